//! Choosing among candidate combinations by association deviation.
//!
//! The original side is the original daily association restricted to the
//! (vehicle, date) pairs already generated plus the vehicle being placed;
//! the generated side is the generated daily association with the candidate
//! tentatively attached. Both sides stack every daily row up to the current
//! date and average the rows of vehicles with at least one hyper-edge. An
//! undefined mean counts as the zero vector.

use std::collections::BTreeSet;

use crate::chargraph::{
    associated, build_association, l2_distance, AssociationMatrix, AssociationTracker, RowSummary, Unit,
};
use crate::config::AssociationConfig;
use crate::error::{Error, Result};
use crate::kg::{trip_key, NewTrip, TripKG};

use super::TripUnitGraph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub index: usize,
    pub deviation: f64,
    pub early_exit: bool,
}

fn mean_or_zero(s: &RowSummary) -> Vec<f64> {
    s.mean().unwrap_or_else(|| vec![0.0; s.sum.len()])
}

fn choose(deviations: impl Iterator<Item = f64>, epsilon: f64) -> Option<Selection> {
    let mut best: Option<Selection> = None;
    for (index, deviation) in deviations.enumerate() {
        if deviation < epsilon {
            return Some(Selection { index, deviation, early_exit: true });
        }
        if best.is_none_or(|b| deviation < b.deviation) {
            best = Some(Selection { index, deviation, early_exit: false });
        }
    }
    best
}

/// Rolling association state of one label across dates.
#[derive(Debug, Clone)]
pub struct AssociationState {
    depth: usize,
    mode: crate::config::AssociationMatch,
    orig_prev: RowSummary,
    gen_prev: RowSummary,
    orig_day: AssociationTracker,
    gen_day: AssociationTracker,
    orig_units: Vec<Vec<Unit>>,
    gen_units: Vec<Vec<Unit>>,
}

impl AssociationState {
    pub fn new(cfg: &AssociationConfig) -> Self {
        AssociationState {
            depth: cfg.depth,
            mode: cfg.match_mode,
            orig_prev: RowSummary::new(cfg.depth),
            gen_prev: RowSummary::new(cfg.depth),
            orig_day: AssociationTracker::new(cfg.depth),
            gen_day: AssociationTracker::new(cfg.depth),
            orig_units: Vec::new(),
            gen_units: Vec::new(),
        }
    }

    fn neighbors(&self, placed: &[Vec<Unit>], units: &[Unit]) -> Vec<usize> {
        placed.iter().enumerate().filter(|(_, u)| associated(u, units, self.mode)).map(|(i, _)| i).collect()
    }

    /// Mean association vector the original graph shows once `original`
    /// (the vehicle's own trips that day) joins the placed vehicles.
    pub fn target(&self, original: &[Unit]) -> Vec<f64> {
        let day = self.orig_day.summary_with(&self.neighbors(&self.orig_units, original));
        mean_or_zero(&self.orig_prev.combined(&day))
    }

    pub fn deviation(&self, target: &[f64], candidate: &[Unit]) -> f64 {
        let day = self.gen_day.summary_with(&self.neighbors(&self.gen_units, candidate));
        l2_distance(target, &mean_or_zero(&self.gen_prev.combined(&day)))
    }

    pub fn select(&self, original: &[Unit], candidates: &[Vec<Unit>], epsilon: f64) -> Result<Selection> {
        let target = self.target(original);
        choose(candidates.iter().map(|c| self.deviation(&target, c)), epsilon)
            .ok_or(Error::Empty("selection needs at least one candidate"))
    }

    pub fn place(&mut self, original: Vec<Unit>, chosen: Vec<Unit>) {
        let on = self.neighbors(&self.orig_units, &original);
        let gn = self.neighbors(&self.gen_units, &chosen);
        self.orig_day.push(&on);
        self.gen_day.push(&gn);
        self.orig_units.push(original);
        self.gen_units.push(chosen);
    }

    /// Folds the finished day into the history and starts a fresh one.
    pub fn end_day(&mut self) {
        self.orig_prev.merge(&self.orig_day.summary());
        self.gen_prev.merge(&self.gen_day.summary());
        self.orig_day = AssociationTracker::new(self.depth);
        self.gen_day = AssociationTracker::new(self.depth);
        self.orig_units.clear();
        self.gen_units.clear();
    }
}

fn vehicles_on(g: &TripKG, date: &str) -> BTreeSet<String> {
    g.trips().filter(|t| t.date == date).map(|t| t.vehicle.to_string()).collect()
}

fn stacked(g: &TripKG, date_vehicles: &[(String, Vec<String>)], cfg: &AssociationConfig) -> Result<RowSummary> {
    let mut s = RowSummary::new(cfg.depth);
    for (date, vehicles) in date_vehicles {
        let day = g.date_subgraph(date);
        let a: AssociationMatrix = build_association(&day, vehicles, cfg.depth, cfg.match_mode)?;
        s.merge(&a.summary());
    }
    Ok(s)
}

/// Graph-level selection, recomputing every association from scratch.
///
/// `original` is the label subgraph, `generated` the graph generated so far
/// under original vehicle ids, `vehicle` the vehicle placed next on `date`.
pub fn select_optimal(
    original: &TripKG,
    generated: &TripKG,
    vehicle: &str,
    date: &str,
    candidates: &[Vec<TripUnitGraph>],
    cfg: &AssociationConfig,
    epsilon: f64,
) -> Result<Selection> {
    if candidates.is_empty() {
        return Err(Error::Empty("selection needs at least one candidate"));
    }
    let dates: Vec<String> = original.dates().into_iter().filter(|d| d.as_str() <= date).collect();
    let week = original
        .vehicle_trips(vehicle)?
        .iter()
        .find(|t| t.date == date)
        .map(|t| t.week.to_string())
        .ok_or_else(|| Error::InvalidArgument(format!("{vehicle} has no trip on {date}")))?;

    let mut orig_days = Vec::new();
    for d in &dates {
        let mut vs = vehicles_on(generated, d);
        if d == date {
            vs.insert(vehicle.to_string());
        }
        orig_days.push((d.clone(), vs.into_iter().collect::<Vec<_>>()));
    }
    let target = mean_or_zero(&stacked(original, &orig_days, cfg)?);

    let mut deviations = Vec::with_capacity(candidates.len());
    for c in candidates {
        let mut g = generated.clone();
        for (i, u) in c.iter().enumerate() {
            let key = trip_key(vehicle, date, i);
            g.add_trip(&NewTrip {
                key: &key,
                vehicle,
                date,
                week: &week,
                span: &u.span,
                origin: &u.origin,
                dest: &u.dest,
                ftime: Default::default(),
            })?;
        }
        let gen_days: Vec<(String, Vec<String>)> =
            dates.iter().map(|d| (d.clone(), vehicles_on(&g, d).into_iter().collect())).collect();
        deviations.push(l2_distance(&target, &mean_or_zero(&stacked(&g, &gen_days, cfg)?)));
    }
    Ok(choose(deviations.into_iter(), epsilon).expect("non-empty"))
}
