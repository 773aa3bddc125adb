//! Characteristic graphs extracted from a (label or date) subgraph.
//!
//! * pattern distribution: trips aggregated by (span, origin, destination),
//! * temporal combination: per (vehicle, date) bit vector over time spans,
//! * spatial continuity: per (vehicle, date) chain of legs in time order,
//! * vehicle association: hyper-edges between vehicles that trip in the same
//!   span from the same origin or to the same destination, summarised by how
//!   many vehicles sit at each hop distance `1..=N`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::Write;

use serde::Serialize;

use crate::config::{AssociationMatch, TimeSpanConfig};
use crate::error::{Error, Result};
use crate::kg::{EntityType, TripKG, TripView};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TripPattern {
    pub span: String,
    pub origin: String,
    pub dest: String,
    pub count: u64,
}

/// Discrete distribution over trip patterns, `p(i) = r_i / sum(r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternDistribution {
    pub patterns: Vec<TripPattern>,
    pub total: u64,
}

impl PatternDistribution {
    pub fn from_trips<'a>(trips: impl Iterator<Item = TripView<'a>>) -> Result<Self> {
        let mut counts: BTreeMap<(&str, &str, &str), u64> = BTreeMap::new();
        for t in trips {
            *counts.entry((t.span, t.origin, t.dest)).or_default() += 1;
        }
        if counts.is_empty() {
            return Err(Error::Empty("pattern distribution needs at least one trip"));
        }
        let patterns: Vec<TripPattern> = counts
            .into_iter()
            .map(|((s, o, d), count)| TripPattern { span: s.into(), origin: o.into(), dest: d.into(), count })
            .collect();
        let total = patterns.iter().map(|p| p.count).sum();
        Ok(PatternDistribution { patterns, total })
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.patterns.iter().map(|p| p.count as f64 / self.total as f64).collect()
    }

    /// The distribution restricted to one span and renormalised.
    pub fn conditional_on_span(&self, span: &str) -> Option<PatternDistribution> {
        let patterns: Vec<TripPattern> = self.patterns.iter().filter(|p| p.span == span).cloned().collect();
        let total = patterns.iter().map(|p| p.count).sum();
        (total > 0).then_some(PatternDistribution { patterns, total })
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["timespan", "origin", "destination", "count"])?;
        for p in &self.patterns {
            w.write_record([p.span.as_str(), &p.origin, &p.dest, &p.count.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn build_pattern_distribution(sub: &TripKG) -> Result<PatternDistribution> {
    PatternDistribution::from_trips(sub.trips())
}

/// `C(v)` for one vehicle and date: bit `n` is set iff the vehicle has a trip
/// in the `n`-th configured span that day.
pub fn temporal_vector(sub: &TripKG, vehicle: &str, date: &str, spans: &TimeSpanConfig) -> Result<Vec<bool>> {
    let mut bits = vec![false; spans.len()];
    for t in sub.vehicle_trips(vehicle)?.iter().filter(|t| t.date == date) {
        if let Some(i) = spans.position(t.span) {
            bits[i] = true;
        }
    }
    Ok(bits)
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// 1 when the previous destination is the next origin.
pub fn continuity_indicator(prev_dest: &str, next_origin: &str) -> u8 {
    u8::from(prev_dest == next_origin)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContinuityChain {
    pub vehicle: String,
    pub date: String,
    /// (origin, destination) per trip in time order.
    pub legs: Vec<(String, String)>,
}

impl ContinuityChain {
    pub fn indicators(&self) -> Vec<u8> {
        self.legs.windows(2).map(|w| continuity_indicator(&w[0].1, &w[1].0)).collect()
    }

    pub fn current_position(&self) -> Option<&str> {
        self.legs.last().map(|(_, d)| d.as_str())
    }

    pub fn pair_count(&self) -> usize {
        self.legs.len().saturating_sub(1)
    }

    pub fn continuous_pairs(&self) -> usize {
        self.indicators().iter().map(|&i| i as usize).sum()
    }

    pub fn rate(&self) -> Option<f64> {
        (self.pair_count() > 0).then(|| self.continuous_pairs() as f64 / self.pair_count() as f64)
    }
}

/// One chain per (vehicle, date), ordered by vehicle then date.
pub fn continuity_chains(g: &TripKG) -> Vec<ContinuityChain> {
    let mut out = Vec::new();
    for v in g.keys_of(EntityType::Vehicle) {
        let trips = g.vehicle_trips(v).expect("vehicle exists");
        for day in trips.chunk_by(|a, b| a.date == b.date) {
            out.push(ContinuityChain {
                vehicle: v.to_string(),
                date: day[0].date.to_string(),
                legs: day.iter().map(|t| (t.origin.to_string(), t.dest.to_string())).collect(),
            });
        }
    }
    out
}

/// A trip reduced to interned (span, origin, destination) symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Unit {
    pub span: u32,
    pub origin: u32,
    pub dest: u32,
}

/// Whether two vehicles' trips of one day form a hyper-edge: same span and
/// (same origin or same destination).
pub fn associated(a: &[Unit], b: &[Unit], mode: AssociationMatch) -> bool {
    match mode {
        AssociationMatch::SameTrip => a
            .iter()
            .any(|x| b.iter().any(|y| x.span == y.span && (x.origin == y.origin || x.dest == y.dest))),
        AssociationMatch::SameDay => {
            let shares = |f: fn(&Unit) -> u32| a.iter().any(|x| b.iter().any(|y| f(x) == f(y)));
            shares(|u| u.span) && (shares(|u| u.origin) || shares(|u| u.dest))
        }
    }
}

/// String interner keeping symbol ids stable in first-seen order.
#[derive(Debug, Default, Clone)]
pub struct Interner {
    ids: BTreeMap<String, u32>,
    names: Vec<String>,
}

impl Interner {
    pub fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.names.len() as u32;
        self.ids.insert(s.to_string(), id);
        self.names.push(s.to_string());
        id
    }

    pub fn get(&self, s: &str) -> Option<u32> {
        self.ids.get(s).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }
}

/// Hyper-edge adjacency among `vehicles`, evaluated per date: two vehicles
/// are linked if on some date their trips satisfy [`associated`].
pub fn hyper_edges(g: &TripKG, vehicles: &[String], mode: AssociationMatch) -> Result<Vec<Vec<usize>>> {
    let mut interner = Interner::default();
    // date -> vehicle index -> units
    let mut days: BTreeMap<String, BTreeMap<usize, Vec<Unit>>> = BTreeMap::new();
    for (i, v) in vehicles.iter().enumerate() {
        for t in g.vehicle_trips(v)? {
            let unit = Unit {
                span: interner.intern(t.span),
                origin: interner.intern(t.origin),
                dest: interner.intern(t.dest),
            };
            days.entry(t.date.to_string()).or_default().entry(i).or_default().push(unit);
        }
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); vehicles.len()];
    for day in days.values() {
        let active: Vec<(&usize, &Vec<Unit>)> = day.iter().collect();
        for (a, (&i, ui)) in active.iter().enumerate() {
            for &(&j, uj) in &active[a + 1..] {
                if associated(ui, uj, mode) {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
    }
    Ok(adj.into_iter().map(|s| s.into_iter().collect()).collect())
}

/// Association characteristic of one set of vehicles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociationMatrix {
    pub vehicles: Vec<String>,
    pub depth: usize,
    /// `counts[m][n-1]` = vehicles at shortest hop distance exactly `n` from `m`.
    pub counts: Vec<Vec<u32>>,
}

impl AssociationMatrix {
    /// Row-normalised counts; `None` for vehicles without any hyper-edge.
    pub fn normalized_rows(&self) -> Vec<Option<Vec<f64>>> {
        self.counts.iter().map(|c| normalize_row(c)).collect()
    }

    pub fn summary(&self) -> RowSummary {
        let mut s = RowSummary::new(self.depth);
        for row in self.normalized_rows().into_iter().flatten() {
            s.add_row(&row);
        }
        s
    }

    pub fn isolated(&self) -> usize {
        self.counts.iter().filter(|c| c.iter().all(|&x| x == 0)).count()
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        let mut header = vec!["vehicle".to_string()];
        header.extend((1..=self.depth).map(|n| format!("c{n}")));
        header.extend((1..=self.depth).map(|n| format!("r{n}")));
        w.write_record(&header)?;
        for (v, (c, r)) in self.vehicles.iter().zip(self.counts.iter().zip(self.normalized_rows())) {
            let mut rec = vec![v.clone()];
            rec.extend(c.iter().map(|x| x.to_string()));
            match r {
                Some(r) => rec.extend(r.iter().map(|x| format!("{x:.6}"))),
                None => rec.extend(std::iter::repeat_n(String::new(), self.depth)),
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn normalize_row(c: &[u32]) -> Option<Vec<f64>> {
    let total: u32 = c.iter().sum();
    (total > 0).then(|| c.iter().map(|&x| x as f64 / total as f64).collect())
}

/// Running sum of normalised association rows.
#[derive(Debug, Clone, PartialEq)]
pub struct RowSummary {
    pub sum: Vec<f64>,
    pub rows: usize,
}

impl RowSummary {
    pub fn new(depth: usize) -> Self {
        RowSummary { sum: vec![0.0; depth], rows: 0 }
    }

    pub fn add_row(&mut self, row: &[f64]) {
        for (s, r) in self.sum.iter_mut().zip(row) {
            *s += r;
        }
        self.rows += 1;
    }

    pub fn merge(&mut self, other: &RowSummary) {
        for (s, o) in self.sum.iter_mut().zip(&other.sum) {
            *s += o;
        }
        self.rows += other.rows;
    }

    pub fn combined(&self, other: &RowSummary) -> RowSummary {
        let mut s = self.clone();
        s.merge(other);
        s
    }

    /// Column mean over the accumulated rows.
    pub fn mean(&self) -> Option<Vec<f64>> {
        (self.rows > 0).then(|| self.sum.iter().map(|s| s / self.rows as f64).collect())
    }
}

/// Counts vehicles at each hop distance `1..=depth` by breadth-first search.
pub fn level_counts(adj: &[Vec<usize>], depth: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::with_capacity(adj.len());
    let mut dist = vec![usize::MAX; adj.len()];
    for start in 0..adj.len() {
        let mut counts = vec![0u32; depth];
        let mut seen = vec![start];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            if dist[x] == depth {
                continue;
            }
            for &y in &adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    counts[dist[y] - 1] += 1;
                    seen.push(y);
                    queue.push_back(y);
                }
            }
        }
        for s in seen {
            dist[s] = usize::MAX;
        }
        out.push(counts);
    }
    out
}

pub fn build_association(
    sub: &TripKG,
    vehicles: &[String],
    depth: usize,
    mode: AssociationMatch,
) -> Result<AssociationMatrix> {
    if depth < 1 {
        return Err(Error::InvalidArgument("association depth must be at least 1".into()));
    }
    let adj = hyper_edges(sub, vehicles, mode)?;
    Ok(AssociationMatrix { vehicles: vehicles.to_vec(), depth, counts: level_counts(&adj, depth) })
}

/// Column mean of the normalised rows of vehicles with at least one hyper-edge.
pub fn mean_vector(a: &AssociationMatrix) -> Result<Vec<f64>> {
    a.summary().mean().ok_or(Error::Empty("association matrix has no connected vehicle"))
}

/// One association matrix per date, over the vehicles active that date.
pub fn daily_association(g: &TripKG, depth: usize, mode: AssociationMatch) -> Result<Vec<(String, AssociationMatrix)>> {
    g.dates()
        .into_iter()
        .map(|d| {
            let day = g.date_subgraph(&d);
            let vehicles: Vec<String> = day.keys_of(EntityType::Vehicle).map(str::to_string).collect();
            let a = build_association(&day, &vehicles, depth, mode)?;
            Ok((d, a))
        })
        .collect()
}

/// Rows of all daily matrices stacked into one summary.
pub fn stacked_summary(daily: &[(String, AssociationMatrix)], depth: usize) -> RowSummary {
    let mut s = RowSummary::new(depth);
    for (_, a) in daily {
        s.merge(&a.summary());
    }
    s
}

/// Shortest-path distances capped at `depth + 1`, maintained as vertices are
/// appended one at a time. A new vertex `v` with neighbour set `S` gives
/// `d(x, v) = 1 + min_{s in S} d(x, s)` and `d'(x, y) = min(d(x, y), d(x, v) + d(v, y))`,
/// since a shortest path visits `v` at most once.
#[derive(Debug, Clone)]
pub struct AssociationTracker {
    depth: usize,
    cap: u8,
    dist: Vec<Vec<u8>>,
}

impl AssociationTracker {
    pub fn new(depth: usize) -> Self {
        assert!((1..255).contains(&depth), "association depth must be in 1..255");
        AssociationTracker { depth, cap: depth as u8 + 1, dist: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    fn distances_to_new(&self, neighbors: &[usize]) -> Vec<u8> {
        (0..self.len())
            .map(|x| {
                let nearest = neighbors.iter().map(|&s| self.dist[x][s]).min().unwrap_or(self.cap);
                nearest.saturating_add(1).min(self.cap)
            })
            .collect()
    }

    fn merged(&self, dv: &[u8], x: usize, y: usize) -> u8 {
        self.dist[x][y].min(dv[x].saturating_add(dv[y]).min(self.cap))
    }

    /// Row summary of the graph as it would be after appending a vertex
    /// linked to `neighbors`, without modifying the tracker.
    pub fn summary_with(&self, neighbors: &[usize]) -> RowSummary {
        let dv = self.distances_to_new(neighbors);
        let n = self.len();
        let mut summary = RowSummary::new(self.depth);
        let mut counts = vec![0u32; self.depth];
        for x in 0..n {
            counts.iter_mut().for_each(|c| *c = 0);
            for y in 0..n {
                if y != x {
                    self.bump(&mut counts, self.merged(&dv, x, y));
                }
            }
            self.bump(&mut counts, dv[x]);
            if let Some(row) = normalize_row(&counts) {
                summary.add_row(&row);
            }
        }
        counts.iter_mut().for_each(|c| *c = 0);
        for &d in &dv {
            self.bump(&mut counts, d);
        }
        if let Some(row) = normalize_row(&counts) {
            summary.add_row(&row);
        }
        summary
    }

    fn bump(&self, counts: &mut [u32], d: u8) {
        if d >= 1 && (d as usize) <= self.depth {
            counts[d as usize - 1] += 1;
        }
    }

    pub fn push(&mut self, neighbors: &[usize]) {
        let dv = self.distances_to_new(neighbors);
        let n = self.len();
        for x in 0..n {
            for y in 0..n {
                let d = self.merged(&dv, x, y);
                self.dist[x][y] = d;
            }
            self.dist[x].push(dv[x]);
        }
        let mut row = dv;
        row.push(0);
        self.dist.push(row);
    }

    pub fn counts(&self) -> Vec<Vec<u32>> {
        (0..self.len())
            .map(|x| {
                let mut c = vec![0u32; self.depth];
                for y in 0..self.len() {
                    if y != x {
                        self.bump(&mut c, self.dist[x][y]);
                    }
                }
                c
            })
            .collect()
    }

    pub fn summary(&self) -> RowSummary {
        let mut s = RowSummary::new(self.depth);
        for c in self.counts() {
            if let Some(row) = normalize_row(&c) {
                s.add_row(&row);
            }
        }
        s
    }
}

pub fn l2_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::CalendarConfig;
    use crate::ingest::TripRecord;
    use crate::kg::build_graph;

    fn graph(rows: &[(&str, &str, &str, &str, &str)]) -> TripKG {
        let recs: Vec<_> = rows.iter().map(|&(v, d, t, o, z)| TripRecord::new(v, d, t, o, z).unwrap()).collect();
        build_graph(&recs, &CalendarConfig::default(), &TimeSpanConfig::default())
    }

    fn names(g: &TripKG) -> Vec<String> {
        g.keys_of(EntityType::Vehicle).map(str::to_string).collect()
    }

    const D: &str = "2019-08-01";

    #[test]
    fn identical_trips_make_one_pattern() {
        let g = graph(&[("V1", D, "08:00:00", "Z1", "Z2"), ("V2", D, "08:10:00", "Z1", "Z2"), ("V3", D, "08:20:00", "Z1", "Z2")]);
        let f = build_pattern_distribution(&g).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.patterns[0].count, 3);
        assert_eq!(f.probabilities(), vec![1.0]);
    }

    #[test]
    fn pattern_shares() {
        let g = graph(&[("V1", D, "08:00:00", "Z1", "Z2"), ("V2", D, "08:10:00", "Z1", "Z2"), ("V3", D, "12:00:00", "Z1", "Z3")]);
        let f = build_pattern_distribution(&g).unwrap();
        let p = f.probabilities();
        assert_eq!(f.total, 3);
        // sorted by span name: Midday before MorningPeak
        assert!((p[0] - 1.0 / 3.0).abs() < 1e-12 && (p[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!(build_pattern_distribution(&TripKG::new()).is_err());
        assert_eq!(f.conditional_on_span("Midday").unwrap().total, 1);
        assert!(f.conditional_on_span("Night").is_none());
    }

    #[test]
    fn temporal_vectors() {
        let spans = TimeSpanConfig::default();
        let g = graph(&[("V1", D, "08:00:00", "Z1", "Z2"), ("V1", D, "17:00:00", "Z2", "Z1"), ("V1", D, "18:00:00", "Z1", "Z3")]);
        assert_eq!(format_bits(&temporal_vector(&g, "V1", D, &spans).unwrap()), "01010");
        assert_eq!(format_bits(&temporal_vector(&g, "V1", "2019-08-02", &spans).unwrap()), "00000");
        assert!(temporal_vector(&g, "V9", D, &spans).is_err());
    }

    #[test]
    fn continuity() {
        assert_eq!(continuity_indicator("Z2", "Z2"), 1);
        assert_eq!(continuity_indicator("Z2", "Z5"), 0);
        let g = graph(&[("V1", D, "08:00:00", "A", "B"), ("V1", D, "12:00:00", "B", "C"), ("V1", D, "18:00:00", "C", "A")]);
        let chains = continuity_chains(&g);
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].indicators(), vec![1, 1]);
        assert_eq!(chains[0].rate(), Some(1.0));
        assert_eq!(chains[0].current_position(), Some("A"));
    }

    #[test]
    fn shared_span_and_origin_links() {
        let g = graph(&[("V1", D, "08:00:00", "Z1", "Z2"), ("V2", D, "08:30:00", "Z1", "Z5")]);
        let a = build_association(&g, &names(&g), 3, AssociationMatch::SameTrip).unwrap();
        assert_eq!(a.counts, vec![vec![1, 0, 0], vec![1, 0, 0]]);
    }

    #[test]
    fn disjoint_spans_do_not_link() {
        let g = graph(&[("V1", D, "08:00:00", "Z1", "Z2"), ("V2", D, "12:00:00", "Z1", "Z2")]);
        let a = build_association(&g, &names(&g), 3, AssociationMatch::SameTrip).unwrap();
        assert_eq!(a.counts, vec![vec![0, 0, 0], vec![0, 0, 0]]);
        assert!(mean_vector(&a).is_err());
    }

    #[test]
    fn same_day_mode_mixes_trips() {
        // V1 and V2 share a span through one trip pair and an origin through
        // another, never on the same pair.
        let g = graph(&[
            ("V1", D, "08:00:00", "Z1", "Z2"),
            ("V1", D, "12:00:00", "Z7", "Z8"),
            ("V2", D, "08:10:00", "Z3", "Z4"),
            ("V2", D, "20:00:00", "Z7", "Z9"),
        ]);
        let v = names(&g);
        assert_eq!(build_association(&g, &v, 1, AssociationMatch::SameTrip).unwrap().counts, vec![vec![0], vec![0]]);
        assert_eq!(build_association(&g, &v, 1, AssociationMatch::SameDay).unwrap().counts, vec![vec![1], vec![1]]);
    }

    #[test]
    fn path_levels() {
        // v1 - v2 via (MorningPeak, Z1); v2 - v3 via (EveningPeak -> Z9)
        let g = graph(&[
            ("V1", D, "08:00:00", "Z1", "Z2"),
            ("V2", D, "08:10:00", "Z1", "Z3"),
            ("V2", D, "17:00:00", "Z3", "Z9"),
            ("V3", D, "17:30:00", "Z4", "Z9"),
        ]);
        let a = build_association(&g, &names(&g), 3, AssociationMatch::SameTrip).unwrap();
        assert_eq!(a.counts[0], vec![1, 1, 0]);
        assert_eq!(a.normalized_rows()[0], Some(vec![0.5, 0.5, 0.0]));
        assert!(build_association(&g, &names(&g), 0, AssociationMatch::SameTrip).is_err());
    }

    #[test]
    fn mean_vector_examples() {
        let m = |counts: Vec<Vec<u32>>| AssociationMatrix { vehicles: vec![], depth: 3, counts };
        assert_eq!(mean_vector(&m(vec![vec![1, 1, 0]])).unwrap(), vec![0.5, 0.5, 0.0]);
        assert_eq!(mean_vector(&m(vec![vec![1, 0, 0], vec![0, 1, 0]])).unwrap(), vec![0.5, 0.5, 0.0]);
        let with_isolated = m(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 0]]);
        assert_eq!(mean_vector(&with_isolated).unwrap(), vec![0.5, 0.5, 0.0]);
        assert_eq!(with_isolated.isolated(), 1);
    }

    #[test]
    fn tracker_matches_bfs_on_path() {
        let adj = vec![vec![1], vec![0, 2], vec![1, 3], vec![2]];
        let mut t = AssociationTracker::new(3);
        for v in 0..adj.len() {
            let earlier: Vec<usize> = adj[v].iter().copied().filter(|&u| u < v).collect();
            t.push(&earlier);
        }
        assert_eq!(t.counts(), level_counts(&adj, 3));
    }

    #[test]
    fn association_csv() {
        let a = AssociationMatrix { vehicles: vec!["A".into(), "B".into()], depth: 2, counts: vec![vec![1, 1], vec![0, 0]] };
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "vehicle,c1,c2,r1,r2\nA,1,1,0.500000,0.500000\nB,0,0,,\n");
    }
}
