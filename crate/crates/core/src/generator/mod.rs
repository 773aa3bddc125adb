//! Synthetic trip generation, one label subgraph at a time and one date at a
//! time.
//!
//! For each date, `n` unit graphs (span, origin, destination) are drawn from
//! the date's pattern distribution, where `n` is the original trip count.
//! Vehicles are then placed in descending order of trip count. Each vehicle
//! keeps its original slot sequence (one slot per original trip, naming the
//! span), receives candidate fillings from the pool ranked by spatial
//! continuity, and among the most continuous candidates the one whose
//! association vector deviates least from the original is taken.
//!
//! When the pool runs short for a vehicle's span, units are drawn from the
//! distribution conditioned on that span and counted as fallbacks. Units left
//! in the pool at the end of a date are reported and discarded, so that
//! `sampled + fallback = consumed + leftover` and the generated trip count
//! equals the original one.

mod candidates;
mod sampling;
mod select;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use candidates::{continuity_score, Combination, UnitPool, Zone};
pub use sampling::AliasTable;
pub use select::{select_optimal, AssociationState, Selection};

use crate::chargraph::{build_pattern_distribution, Interner, PatternDistribution, Unit};
use crate::config::{PipelineConfig, TimeSpanConfig};
use crate::error::{Error, Result};
use crate::kg::{trip_key, EntityType, NewTrip, TripKG};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TripUnitGraph {
    pub span: String,
    pub origin: String,
    pub dest: String,
}

impl TripUnitGraph {
    pub fn new(span: &str, origin: &str, dest: &str) -> Self {
        TripUnitGraph { span: span.into(), origin: origin.into(), dest: dest.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateCombination {
    pub units: Vec<TripUnitGraph>,
    pub continuity: u32,
}

/// Draws `n` unit graphs i.i.d. from `f`.
pub fn generate_unit_graphs<R: Rng + ?Sized>(
    f: &PatternDistribution,
    n: usize,
    rng: &mut R,
) -> Result<Vec<TripUnitGraph>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if f.is_empty() {
        return Err(Error::Empty("cannot sample from an empty pattern distribution"));
    }
    let table = AliasTable::new(&f.probabilities())?;
    Ok((0..n)
        .map(|_| {
            let p = &f.patterns[table.sample(rng)];
            TripUnitGraph::new(&p.span, &p.origin, &p.dest)
        })
        .collect())
}

/// Candidate combinations for one vehicle from a pool of unit graphs.
///
/// `slots` lists the span of each trip to fill, chronologically. At most
/// `k` candidates are returned, sorted by continuity descending; one of them
/// always attains the maximal continuity over all feasible fillings.
pub fn candidate_combinations<R: Rng + ?Sized>(
    slots: &[&str],
    position: Option<&str>,
    pool: &[TripUnitGraph],
    k: usize,
    rng: &mut R,
) -> Result<Vec<CandidateCombination>> {
    let mut spans = Interner::default();
    let mut zones = Interner::default();
    for u in pool {
        spans.intern(&u.span);
    }
    let slot_ids = slots
        .iter()
        .map(|s| {
            spans
                .get(s)
                .map(|i| i as usize)
                .ok_or_else(|| Error::InvalidArgument(format!("no unit graph for span `{s}` in the pool")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut p = UnitPool::new(pool.iter().map(|u| &u.span).collect::<BTreeSet<_>>().len());
    for u in pool {
        p.add(spans.intern(&u.span) as usize, zones.intern(&u.origin), zones.intern(&u.dest));
    }
    let pos = position.map(|z| zones.intern(z));
    let found = candidates::candidates(&slot_ids, pos, &p, k, rng)?;
    Ok(found
        .into_iter()
        .map(|c| CandidateCombination {
            units: c
                .legs
                .iter()
                .zip(&slot_ids)
                .map(|(&(o, d), &s)| TripUnitGraph::new(spans.name(s as u32), zones.name(o), zones.name(d)))
                .collect(),
            continuity: c.continuity,
        })
        .collect())
}

/// One generated trip under its original vehicle id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct GeneratedTrip {
    pub vehicle: String,
    pub date: String,
    pub seq: usize,
    pub span: String,
    pub origin: String,
    pub dest: String,
    pub week: String,
}

/// Per (label, date) generation statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DateReport {
    pub label: String,
    pub date: String,
    pub original_trips: usize,
    pub generated_trips: usize,
    pub vehicles: usize,
    pub sampled: usize,
    pub fallback: usize,
    pub consumed: usize,
    pub leftover: usize,
    pub continuity_pairs: usize,
    pub continuous_pairs: usize,
    pub early_exits: usize,
    pub mean_deviation: Option<f64>,
}

struct VehicleDay<'a> {
    vehicle: &'a str,
    slots: Vec<usize>,
    original: Vec<Unit>,
    weeks: Vec<&'a str>,
}

/// Rolling generator for one label subgraph.
pub struct LabelGenerator<'a> {
    label: String,
    sub: &'a TripKG,
    spans: &'a TimeSpanConfig,
    cfg: &'a PipelineConfig,
    zones: Interner,
    positions: HashMap<String, Zone>,
    state: AssociationState,
    rng: ChaCha8Rng,
}

impl<'a> LabelGenerator<'a> {
    pub fn new(label: &str, sub: &'a TripKG, cfg: &'a PipelineConfig, rng: ChaCha8Rng) -> Self {
        LabelGenerator {
            label: label.to_string(),
            sub,
            spans: &cfg.timespans,
            cfg,
            zones: Interner::default(),
            positions: HashMap::new(),
            state: AssociationState::new(&cfg.association),
            rng,
        }
    }

    fn span_index(&self, name: &str) -> Result<usize> {
        self.spans
            .position(name)
            .ok_or_else(|| Error::InvalidArgument(format!("span `{name}` is not in the configured time spans")))
    }

    fn draw(&mut self, table: &AliasTable, f: &PatternDistribution, pool: &mut UnitPool) -> Result<()> {
        let p = &f.patterns[table.sample(&mut self.rng)];
        let s = self.span_index(&p.span)?;
        pool.add(s, self.zones.intern(&p.origin), self.zones.intern(&p.dest));
        Ok(())
    }

    /// Generates all trips of `date`. Dates must be visited in ascending order
    /// for positions and association history to roll forward correctly.
    pub fn generate_date(&mut self, date: &str) -> Result<(Vec<GeneratedTrip>, DateReport)> {
        let sub = self.sub;
        let day = sub.date_subgraph(date);
        let mut report = DateReport {
            label: self.label.clone(),
            date: date.to_string(),
            original_trips: day.entity_count(EntityType::Trip),
            generated_trips: 0,
            vehicles: 0,
            sampled: 0,
            fallback: 0,
            consumed: 0,
            leftover: 0,
            continuity_pairs: 0,
            continuous_pairs: 0,
            early_exits: 0,
            mean_deviation: None,
        };
        if report.original_trips == 0 {
            return Ok((Vec::new(), report));
        }

        let f = build_pattern_distribution(&day)?;
        let table = AliasTable::new(&f.probabilities())?;
        let mut pool = UnitPool::new(self.spans.len());
        for _ in 0..report.original_trips {
            self.draw(&table, &f, &mut pool)?;
        }
        report.sampled = report.original_trips;

        let mut days: Vec<VehicleDay<'a>> = Vec::new();
        for v in sub.keys_of(EntityType::Vehicle) {
            let trips: Vec<_> = sub.vehicle_trips(v)?.into_iter().filter(|t| t.date == date).collect();
            if trips.is_empty() {
                continue;
            }
            let mut vd = VehicleDay { vehicle: v, slots: Vec::new(), original: Vec::new(), weeks: Vec::new() };
            for t in trips {
                let s = self.span_index(t.span)?;
                vd.slots.push(s);
                vd.original.push(Unit { span: s as u32, origin: self.zones.intern(t.origin), dest: self.zones.intern(t.dest) });
                vd.weeks.push(t.week);
            }
            days.push(vd);
        }
        days.sort_by(|a, b| b.slots.len().cmp(&a.slots.len()).then(a.vehicle.cmp(b.vehicle)));
        report.vehicles = days.len();

        let mut conditional: BTreeMap<usize, (PatternDistribution, AliasTable)> = BTreeMap::new();
        let mut out = Vec::with_capacity(report.original_trips);
        let mut deviation_sum = 0.0;
        for vd in days {
            let mut need: BTreeMap<usize, u32> = BTreeMap::new();
            for &s in &vd.slots {
                *need.entry(s).or_default() += 1;
            }
            for (&s, &n) in &need {
                let have = pool.count(s);
                if have >= n {
                    continue;
                }
                if let std::collections::btree_map::Entry::Vacant(slot) = conditional.entry(s) {
                    let name = &self.spans.spans()[s].name;
                    let cf = f
                        .conditional_on_span(name)
                        .ok_or(Error::Empty("no pattern for a required span to fall back on"))?;
                    let ct = AliasTable::new(&cf.probabilities())?;
                    slot.insert((cf, ct));
                }
                let (cf, ct) = &conditional[&s];
                for _ in have..n {
                    self.draw(ct, cf, &mut pool)?;
                    report.fallback += 1;
                }
            }

            let position = self.positions.get(vd.vehicle).copied();
            let mut cands =
                candidates::candidates(&vd.slots, position, &pool, self.cfg.generation.beam_width, &mut self.rng)?;
            let top = cands[0].continuity;
            cands.retain(|c| c.continuity == top);
            let units: Vec<Vec<Unit>> = cands
                .iter()
                .map(|c| {
                    c.legs
                        .iter()
                        .zip(&vd.slots)
                        .map(|(&(o, d), &s)| Unit { span: s as u32, origin: o, dest: d })
                        .collect()
                })
                .collect();
            let sel = self.state.select(&vd.original, &units, self.cfg.generation.early_exit_epsilon)?;
            deviation_sum += sel.deviation;
            report.early_exits += usize::from(sel.early_exit);
            let chosen = &cands[sel.index];
            report.continuity_pairs += chosen.legs.len() - usize::from(position.is_none());
            report.continuous_pairs += chosen.continuity as usize;

            for (seq, ((&(o, d), &s), week)) in chosen.legs.iter().zip(&vd.slots).zip(&vd.weeks).enumerate() {
                pool.take(s, o, d);
                out.push(GeneratedTrip {
                    vehicle: vd.vehicle.to_string(),
                    date: date.to_string(),
                    seq,
                    span: self.spans.spans()[s].name.clone(),
                    origin: self.zones.name(o).to_string(),
                    dest: self.zones.name(d).to_string(),
                    week: week.to_string(),
                });
            }
            let last = chosen.legs.last().expect("vehicles have at least one trip").1;
            self.positions.insert(vd.vehicle.to_string(), last);
            self.state.place(vd.original, units[sel.index].clone());
        }
        self.state.end_day();

        report.generated_trips = out.len();
        report.consumed = out.len();
        report.leftover = pool.total() as usize;
        report.mean_deviation = (report.vehicles > 0).then(|| deviation_sum / report.vehicles as f64);
        assert_eq!(report.sampled + report.fallback, report.consumed + report.leftover, "pool conservation");
        Ok((out, report))
    }

    pub fn run(mut self) -> Result<(Vec<GeneratedTrip>, Vec<DateReport>)> {
        let mut trips = Vec::new();
        let mut reports = Vec::new();
        for d in self.sub.dates() {
            let (t, r) = self.generate_date(&d)?;
            trips.extend(t);
            reports.push(r);
        }
        Ok((trips, reports))
    }
}

/// Generates one date of a label subgraph without history and returns it as
/// a graph under the original vehicle ids.
pub fn generate_date<R: Rng + ?Sized>(
    label_sub: &TripKG,
    date: &str,
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<TripKG> {
    if !label_sub.dates().iter().any(|d| d == date) {
        return Err(Error::InvalidArgument(format!("date {date} has no trips in the subgraph")));
    }
    let mut gen = LabelGenerator::new("", label_sub, cfg, ChaCha8Rng::from_rng(rng).map_err(|e| Error::InvalidArgument(e.to_string()))?);
    let (trips, _) = gen.generate_date(date)?;
    assemble_graph(&trips, &BTreeMap::new(), &cfg.timespans)
}

/// Builds a trip graph from generated trips in (vehicle, date, seq) order.
/// Trip start times are the start of each trip's span.
pub fn assemble_graph(
    trips: &[GeneratedTrip],
    labels: &BTreeMap<String, String>,
    spans: &TimeSpanConfig,
) -> Result<TripKG> {
    let mut sorted: Vec<&GeneratedTrip> = trips.iter().collect();
    sorted.sort_by(|a, b| (&a.vehicle, &a.date, a.seq).cmp(&(&b.vehicle, &b.date, b.seq)));
    let mut g = TripKG::new();
    for t in sorted {
        let span = spans
            .get(&t.span)
            .ok_or_else(|| Error::InvalidArgument(format!("span `{}` is not configured", t.span)))?;
        let key = trip_key(&t.vehicle, &t.date, t.seq);
        g.add_trip(&NewTrip {
            key: &key,
            vehicle: &t.vehicle,
            date: &t.date,
            week: &t.week,
            span: &t.span,
            origin: &t.origin,
            dest: &t.dest,
            ftime: span.start,
        })?;
    }
    let present: BTreeMap<String, String> =
        labels.iter().filter(|(v, _)| g.id(EntityType::Vehicle, v).is_some()).map(|(v, l)| (v.clone(), l.clone())).collect();
    g.attach_labels(&present)?;
    Ok(g)
}

#[derive(Debug, Clone)]
pub struct GenerationOutput {
    /// Generated graph under pseudonyms, labels attached.
    pub graph: TripKG,
    /// Generated trips under pseudonyms.
    pub trips: Vec<GeneratedTrip>,
    pub reports: Vec<DateReport>,
    /// Pseudonym to original vehicle id.
    pub mapping: BTreeMap<String, String>,
}

impl GenerationOutput {
    pub fn fallbacks(&self) -> usize {
        self.reports.iter().map(|r| r.fallback).sum()
    }

    /// The generated graph under the original vehicle ids.
    pub fn graph_with_original_ids(&self, spans: &TimeSpanConfig) -> Result<TripKG> {
        let trips: Vec<GeneratedTrip> = self
            .trips
            .iter()
            .map(|t| GeneratedTrip { vehicle: self.mapping[&t.vehicle].clone(), ..t.clone() })
            .collect();
        let labels: BTreeMap<String, String> = self
            .mapping
            .iter()
            .filter_map(|(p, o)| self.graph.label_of(p).map(|l| (o.clone(), l.to_string())))
            .collect();
        assemble_graph(&trips, &labels, spans)
    }
}

/// Fresh vehicle ids, shuffled, that never collide with `taken`.
pub fn pseudonyms<R: Rng + ?Sized>(
    vehicles: &[String],
    taken: &BTreeSet<String>,
    rng: &mut R,
) -> BTreeMap<String, String> {
    let mut order: Vec<&String> = vehicles.iter().collect();
    order.shuffle(rng);
    let width = vehicles.len().to_string().len().max(6);
    let mut names = (1..).map(|i| format!("G{i:0width$}")).filter(|n| !taken.contains(n));
    order.into_iter().map(|v| (v.clone(), names.next().expect("unbounded"))).collect()
}

/// Generates every label subgraph of `g` and composes the results.
///
/// Each label draws from its own random stream, so labels are independent
/// of one another and of processing order.
pub fn generate_all(g: &TripKG, cfg: &PipelineConfig, seed: u64) -> Result<GenerationOutput> {
    if !g.has_labels() {
        return Err(Error::LabelsNotAttached);
    }
    let mut trips = Vec::new();
    let mut reports = Vec::new();
    let mut labels: BTreeMap<String, String> = BTreeMap::new();
    for (i, label) in g.label_names().into_iter().enumerate() {
        let sub = g.label_subgraph(&label)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64 + 1);
        let (t, r) = LabelGenerator::new(&label, &sub, cfg, rng).run()?;
        for trip in &t {
            labels.entry(trip.vehicle.clone()).or_insert_with(|| label.clone());
        }
        trips.extend(t);
        reports.extend(r);
    }

    let vehicles: Vec<String> = labels.keys().cloned().collect();
    let taken: BTreeSet<String> = g.keys_of(EntityType::Vehicle).map(str::to_string).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forward = pseudonyms(&vehicles, &taken, &mut rng);
    for t in &mut trips {
        t.vehicle = forward[&t.vehicle].clone();
    }
    trips.sort();
    let pseudo_labels: BTreeMap<String, String> =
        labels.into_iter().map(|(v, l)| (forward[&v].clone(), l)).collect();
    let graph = assemble_graph(&trips, &pseudo_labels, &cfg.timespans)?;
    let mapping = forward.into_iter().map(|(o, p)| (p, o)).collect();
    Ok(GenerationOutput { graph, trips, reports, mapping })
}

/// Trips in the input CSV schema; `ftime` is the span start.
pub fn write_trips_csv<W: Write>(sink: W, trips: &[GeneratedTrip], spans: &TimeSpanConfig) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(crate::ingest::COLUMNS)?;
    for t in trips {
        let start = spans.get(&t.span).map(|s| s.start.to_string()).unwrap_or_default();
        w.write_record([t.vehicle.as_str(), &t.date, &start, &t.origin, &t.dest])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_reports_jsonl<W: Write>(mut sink: W, reports: &[DateReport]) -> Result<()> {
    for r in reports {
        serde_json::to_writer(&mut sink, r).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        sink.write_all(b"\n")?;
    }
    sink.flush()?;
    Ok(())
}

pub fn write_mapping_csv<W: Write>(sink: W, mapping: &BTreeMap<String, String>) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["pseudonym", "vehicle"])?;
    for (p, v) in mapping {
        w.write_record([p, v])?;
    }
    w.flush()?;
    Ok(())
}
