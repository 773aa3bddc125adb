//! Unit pool and per-vehicle candidate combinations.
//!
//! A vehicle's day is a list of slots, one per original trip, each naming a
//! span. A combination fills every slot with a unit of that span from the
//! pool. Its continuity score counts adjacent legs where the destination of
//! one is the origin of the next, starting from the vehicle's current
//! position (an unknown position never scores).

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

pub type Zone = u32;

/// Multiset of (origin, destination) units grouped by span index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UnitPool {
    groups: Vec<BTreeMap<(Zone, Zone), u32>>,
}

impl UnitPool {
    pub fn new(span_count: usize) -> Self {
        UnitPool { groups: vec![BTreeMap::new(); span_count] }
    }

    pub fn span_count(&self) -> usize {
        self.groups.len()
    }

    pub fn add(&mut self, span: usize, origin: Zone, dest: Zone) {
        *self.groups[span].entry((origin, dest)).or_default() += 1;
    }

    pub fn count(&self, span: usize) -> u32 {
        self.groups[span].values().sum()
    }

    pub fn total(&self) -> u64 {
        (0..self.groups.len()).map(|s| self.count(s) as u64).sum()
    }

    pub fn available(&self, span: usize, origin: Zone, dest: Zone) -> u32 {
        self.groups[span].get(&(origin, dest)).copied().unwrap_or(0)
    }

    /// Removes one unit. Panics if it is not in the pool.
    pub fn take(&mut self, span: usize, origin: Zone, dest: Zone) {
        let group = &mut self.groups[span];
        let c = group.get_mut(&(origin, dest)).expect("unit present in pool");
        *c -= 1;
        if *c == 0 {
            group.remove(&(origin, dest));
        }
    }

    fn group(&self, span: usize) -> impl Iterator<Item = (Zone, Zone, u32)> + '_ {
        self.groups[span].iter().map(|(&(o, d), &c)| (o, d, c))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Combination {
    /// (origin, destination) per slot.
    pub legs: Vec<(Zone, Zone)>,
    pub continuity: u32,
}

pub fn continuity_score(position: Option<Zone>, legs: &[(Zone, Zone)]) -> u32 {
    let mut pos = position;
    let mut score = 0;
    for &(o, d) in legs {
        score += u32::from(pos == Some(o));
        pos = Some(d);
    }
    score
}

/// Upper bound on the continuity still attainable from slot `i` onward,
/// ignoring depletion: `max(base, by_origin[z])` for a running position `z`.
struct Bound {
    base: u32,
    by_origin: HashMap<Zone, u32>,
}

impl Bound {
    fn at(&self, pos: Option<Zone>) -> u32 {
        pos.and_then(|z| self.by_origin.get(&z)).map_or(self.base, |&b| b.max(self.base))
    }
}

fn bounds(slots: &[usize], pool: &UnitPool) -> Vec<Bound> {
    let mut out: Vec<Bound> = Vec::with_capacity(slots.len() + 1);
    out.push(Bound { base: 0, by_origin: HashMap::new() });
    for &span in slots.iter().rev() {
        let next = out.last().expect("non-empty");
        let mut b = Bound { base: 0, by_origin: HashMap::new() };
        for (o, d, _) in pool.group(span) {
            let rest = next.at(Some(d));
            b.base = b.base.max(rest);
            let e = b.by_origin.entry(o).or_default();
            *e = (*e).max(rest + 1);
        }
        out.push(b);
    }
    out.reverse();
    out
}

fn used(legs: &[(Zone, Zone)], slots: &[usize], span: usize, unit: (Zone, Zone)) -> u32 {
    legs.iter().zip(slots).filter(|&(&l, &s)| s == span && l == unit).count() as u32
}

fn check_supply(slots: &[usize], pool: &UnitPool) -> Result<()> {
    let mut need: BTreeMap<usize, u32> = BTreeMap::new();
    for &s in slots {
        *need.entry(s).or_default() += 1;
    }
    for (s, n) in need {
        if pool.count(s) < n {
            return Err(Error::InvalidArgument(format!("pool group {s} holds {} units, {n} needed", pool.count(s))));
        }
    }
    Ok(())
}

/// Up to `k` combinations for `slots`, sorted by continuity descending. The
/// result always contains a combination of maximal continuity.
pub fn candidates<R: Rng + ?Sized>(
    slots: &[usize],
    position: Option<Zone>,
    pool: &UnitPool,
    k: usize,
    rng: &mut R,
) -> Result<Vec<Combination>> {
    if k == 0 {
        return Err(Error::InvalidArgument("beam width must be at least 1".into()));
    }
    check_supply(slots, pool)?;
    let bound = bounds(slots, pool);

    struct State {
        legs: Vec<(Zone, Zone)>,
        score: u32,
        priority: u32,
    }
    let mut beam = vec![State { legs: Vec::new(), score: 0, priority: 0 }];
    for (i, &span) in slots.iter().enumerate() {
        let mut next = Vec::new();
        for st in &beam {
            let pos = st.legs.last().map(|&(_, d)| d).or(position);
            for (o, d, c) in pool.group(span) {
                if c <= used(&st.legs, &slots[..i], span, (o, d)) {
                    continue;
                }
                let score = st.score + u32::from(pos == Some(o));
                let mut legs = st.legs.clone();
                legs.push((o, d));
                next.push(State { legs, score, priority: score + bound[i + 1].at(Some(d)) });
            }
        }
        next.shuffle(rng);
        next.sort_by_key(|s| std::cmp::Reverse(s.priority));
        next.truncate(k);
        beam = next;
    }

    let mut out: Vec<Combination> =
        beam.into_iter().map(|s| Combination { legs: s.legs, continuity: s.score }).collect();
    let best = exact_best(slots, position, pool, &bound, rng);
    if out.iter().all(|c| c.continuity < best.continuity) {
        out.pop();
        out.insert(0, best);
    }
    out.sort_by_key(|c| std::cmp::Reverse(c.continuity));
    Ok(out)
}

/// Node limit for the exact search. The depletion-free bound is almost always
/// attained on the first descent, so the limit only matters for adversarial pools.
const SEARCH_BUDGET: usize = 200_000;

/// Branch and bound over distinct units for a maximal-continuity combination.
fn exact_best<R: Rng + ?Sized>(
    slots: &[usize],
    position: Option<Zone>,
    pool: &UnitPool,
    bound: &[Bound],
    rng: &mut R,
) -> Combination {
    struct Search<'a> {
        slots: &'a [usize],
        bound: &'a [Bound],
        options: Vec<Vec<(Zone, Zone, u32)>>,
        legs: Vec<(Zone, Zone)>,
        best: Option<Combination>,
        target: u32,
        budget: usize,
    }
    impl Search<'_> {
        fn go(&mut self, i: usize, pos: Option<Zone>, score: u32) -> bool {
            if self.budget == 0 && self.best.is_some() {
                return true;
            }
            self.budget = self.budget.saturating_sub(1);
            if let Some(b) = &self.best {
                if score + self.bound[i].at(pos) <= b.continuity {
                    return false;
                }
            }
            if i == self.slots.len() {
                self.best = Some(Combination { legs: self.legs.clone(), continuity: score });
                return score == self.target;
            }
            let span = self.slots[i];
            let mut opts = self.options[i].clone();
            opts.sort_by_key(|&(o, d, _)| std::cmp::Reverse(u32::from(pos == Some(o)) + self.bound[i + 1].at(Some(d))));
            for (o, d, c) in opts {
                if c <= used(&self.legs, &self.slots[..i], span, (o, d)) {
                    continue;
                }
                self.legs.push((o, d));
                let done = self.go(i + 1, Some(d), score + u32::from(pos == Some(o)));
                self.legs.pop();
                if done {
                    return true;
                }
            }
            false
        }
    }
    let options = slots
        .iter()
        .map(|&s| {
            let mut g: Vec<_> = pool.group(s).collect();
            g.shuffle(rng);
            g
        })
        .collect();
    let mut search = Search {
        slots,
        bound,
        options,
        legs: Vec::new(),
        best: None,
        target: bound[0].at(position),
        budget: SEARCH_BUDGET,
    };
    search.go(0, position, 0);
    search.best.expect("supply was checked")
}
