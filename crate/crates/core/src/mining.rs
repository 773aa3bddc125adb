//! Per-vehicle mobility characteristics and the five-way label system.
//!
//! Three families are computed for each vehicle: trip frequency (trips per
//! day of the analysis window), distribution concentration of its time spans,
//! origins and destinations, and association scores for time/origin,
//! time/destination and origin/destination pairings.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{parse_date, AssociationFormula, MiningConfig};
use crate::error::{Error, Result};
use crate::kg::{EntityType, TripKG};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FrequencyClass {
    ExtremelyLow,
    Low,
    General,
    High,
}

impl FrequencyClass {
    /// Boundaries: `<= t1`, `(t1, t2]`, `(t2, t3)`, `>= t3`.
    pub fn classify(per_day: f64, cfg: &MiningConfig) -> Self {
        if per_day <= cfg.freq_extremely_low {
            FrequencyClass::ExtremelyLow
        } else if per_day <= cfg.freq_low {
            FrequencyClass::Low
        } else if per_day < cfg.freq_high {
            FrequencyClass::General
        } else {
            FrequencyClass::High
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FrequencyClass::ExtremelyLow => "ExtremelyLow",
            FrequencyClass::Low => "Low",
            FrequencyClass::General => "General",
            FrequencyClass::High => "High",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConcentrationLevel {
    Dispersed = 0,
    Concentrated = 1,
    HighlyConcentrated = 2,
}

impl ConcentrationLevel {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MobilityLabel {
    PassingVehicle,
    Commuter,
    VehicleOfStable,
    VehicleOfRandom,
    VehicleOfHighFrequency,
}

impl MobilityLabel {
    pub const ALL: [MobilityLabel; 5] = [
        MobilityLabel::PassingVehicle,
        MobilityLabel::Commuter,
        MobilityLabel::VehicleOfStable,
        MobilityLabel::VehicleOfRandom,
        MobilityLabel::VehicleOfHighFrequency,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MobilityLabel::PassingVehicle => "PassingVehicle",
            MobilityLabel::Commuter => "Commuter",
            MobilityLabel::VehicleOfStable => "VehicleOfStable",
            MobilityLabel::VehicleOfRandom => "VehicleOfRandom",
            MobilityLabel::VehicleOfHighFrequency => "VehicleOfHighFrequency",
        }
    }
}

impl fmt::Display for MobilityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MobilityLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MobilityLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown label `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MobilityProfile {
    pub vehicle: String,
    pub trip_count: usize,
    pub per_day: f64,
    pub freq_class: FrequencyClass,
    pub time_concentration: ConcentrationLevel,
    pub origin_concentration: ConcentrationLevel,
    pub destination_concentration: ConcentrationLevel,
    pub s_d: u8,
    pub score_origin_time: f64,
    pub score_destination_time: f64,
    pub score_od: f64,
    pub s_am: f64,
    pub label: MobilityLabel,
}

pub fn trip_frequency(g: &TripKG, vehicle: &str, day_count: u32, cfg: &MiningConfig) -> Result<FrequencyClass> {
    if day_count == 0 {
        return Err(Error::InvalidArgument("day_count must be positive".into()));
    }
    let trips = g.vehicle_trips(vehicle)?.len();
    Ok(FrequencyClass::classify(trips as f64 / day_count as f64, cfg))
}

/// `round(num/den * n)` with halves rounded up, in exact integer arithmetic.
fn round_half_up_fraction(n: usize, num: usize, den: usize) -> usize {
    (2 * num * n + den) / (2 * den)
}

/// Concentration of one distribution item.
///
/// `counts` are per-category trip counts; only categories with at least one
/// trip count towards `N`. Highly concentrated when the top `round(0.2 N)`
/// categories hold at least 80% of trips, concentrated when the top
/// `round(0.3 N)` hold at least 70%. Both prefix lengths are clamped to at
/// least one category.
pub fn concentration(counts: &[u64]) -> Result<ConcentrationLevel> {
    let mut used: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
    if used.is_empty() {
        return Err(Error::Empty("concentration needs at least one positive count"));
    }
    used.sort_unstable_by(|a, b| b.cmp(a));
    let n = used.len();
    let total: u64 = used.iter().sum();
    let top = |k: usize| -> u64 { used[..k.clamp(1, n)].iter().sum() };
    // top/total >= 8/10  <=>  10*top >= 8*total
    if 10 * top(round_half_up_fraction(n, 2, 10)) >= 8 * total {
        Ok(ConcentrationLevel::HighlyConcentrated)
    } else if 10 * top(round_half_up_fraction(n, 3, 10)) >= 7 * total {
        Ok(ConcentrationLevel::Concentrated)
    } else {
        Ok(ConcentrationLevel::Dispersed)
    }
}

/// Association score in [0, 100] of a count matrix whose rows are the first
/// category (time span, or origin zone) and columns the paired zone.
///
/// For each row with total `T_i`, largest cell `x_i` and `m_i` nonzero cells,
/// `q_i = max(1, rho * T_i)` and the row contributes
/// `(1 + relu(q_i - m_i) / q_i) * x_i`, capped at `T_i` (or at 1 for
/// [`AssociationFormula::Literal`]). The score is 100 times the summed row
/// terms over the matrix total.
pub fn association_score(p: &[Vec<u64>], rho: f64, formula: AssociationFormula) -> Result<f64> {
    let total: u64 = p.iter().flatten().sum();
    if total == 0 {
        return Err(Error::Empty("association matrix has no trips"));
    }
    let mut sum = 0.0;
    for row in p {
        let row_total: u64 = row.iter().sum();
        if row_total == 0 {
            continue;
        }
        let q = (rho * row_total as f64).max(1.0);
        let m = row.iter().filter(|&&c| c > 0).count() as f64;
        let x = *row.iter().max().expect("non-empty row") as f64;
        let boosted = (1.0 + (q - m).max(0.0) / q) * x;
        let cap = match formula {
            AssociationFormula::Capped => row_total as f64,
            AssociationFormula::Literal => 1.0,
        };
        sum += boosted.min(cap);
    }
    Ok((100.0 * sum / total as f64).clamp(0.0, 100.0))
}

pub fn assign_label(freq: FrequencyClass, s_d: u8, s_am: f64, cfg: &MiningConfig) -> MobilityLabel {
    match freq {
        FrequencyClass::ExtremelyLow => MobilityLabel::PassingVehicle,
        FrequencyClass::High => MobilityLabel::VehicleOfHighFrequency,
        FrequencyClass::Low | FrequencyClass::General => {
            let associated = s_am >= cfg.theta_am;
            let concentrated = s_d >= cfg.theta_d;
            match (associated, concentrated) {
                (true, true) => MobilityLabel::Commuter,
                (true, false) | (false, true) => MobilityLabel::VehicleOfStable,
                (false, false) => MobilityLabel::VehicleOfRandom,
            }
        }
    }
}

/// Number of days between the first and last trip date, inclusive.
pub fn window_days(g: &TripKG) -> u32 {
    let dates = g.dates();
    match (dates.first().and_then(|d| parse_date(d)), dates.last().and_then(|d| parse_date(d))) {
        (Some(a), Some(b)) => (b - a).num_days() as u32 + 1,
        _ => 1,
    }
}

/// Dense count matrix over sorted row and column keys.
fn count_matrix<'a>(pairs: impl Iterator<Item = (&'a str, &'a str)>) -> Vec<Vec<u64>> {
    let mut cells: BTreeMap<&str, BTreeMap<&str, u64>> = BTreeMap::new();
    for (r, c) in pairs {
        *cells.entry(r).or_default().entry(c).or_default() += 1;
    }
    cells.into_values().map(|row| row.into_values().collect()).collect()
}

fn counts<'a>(items: impl Iterator<Item = &'a str>) -> Vec<u64> {
    let mut m: BTreeMap<&str, u64> = BTreeMap::new();
    for i in items {
        *m.entry(i).or_default() += 1;
    }
    m.into_values().collect()
}

pub fn mine_vehicle(g: &TripKG, vehicle: &str, day_count: u32, cfg: &MiningConfig) -> Result<MobilityProfile> {
    let trips = g.vehicle_trips(vehicle)?;
    let per_day = trips.len() as f64 / day_count.max(1) as f64;
    let freq_class = FrequencyClass::classify(per_day, cfg);
    if trips.is_empty() {
        return Ok(MobilityProfile {
            vehicle: vehicle.to_string(),
            trip_count: 0,
            per_day,
            freq_class,
            time_concentration: ConcentrationLevel::Dispersed,
            origin_concentration: ConcentrationLevel::Dispersed,
            destination_concentration: ConcentrationLevel::Dispersed,
            s_d: 0,
            score_origin_time: 0.0,
            score_destination_time: 0.0,
            score_od: 0.0,
            s_am: 0.0,
            label: assign_label(freq_class, 0, 0.0, cfg),
        });
    }
    let time_c = concentration(&counts(trips.iter().map(|t| t.span)))?;
    let origin_c = concentration(&counts(trips.iter().map(|t| t.origin)))?;
    let dest_c = concentration(&counts(trips.iter().map(|t| t.dest)))?;
    let s_d = time_c.code() + origin_c.code() + dest_c.code();

    let (rho, formula) = (cfg.rho, cfg.association_formula);
    let ot = association_score(&count_matrix(trips.iter().map(|t| (t.span, t.origin))), rho, formula)?;
    let dt = association_score(&count_matrix(trips.iter().map(|t| (t.span, t.dest))), rho, formula)?;
    let od = association_score(&count_matrix(trips.iter().map(|t| (t.origin, t.dest))), rho, formula)?;
    let s_am = (ot + dt + od) / 3.0;

    Ok(MobilityProfile {
        vehicle: vehicle.to_string(),
        trip_count: trips.len(),
        per_day,
        freq_class,
        time_concentration: time_c,
        origin_concentration: origin_c,
        destination_concentration: dest_c,
        s_d,
        score_origin_time: ot,
        score_destination_time: dt,
        score_od: od,
        s_am,
        label: assign_label(freq_class, s_d, s_am, cfg),
    })
}

/// Profiles for every vehicle, keyed by vehicle id.
pub fn mine_all(g: &TripKG, cfg: &MiningConfig) -> Result<BTreeMap<String, MobilityProfile>> {
    let days = cfg.day_count.unwrap_or_else(|| window_days(g));
    g.keys_of(EntityType::Vehicle).map(|v| Ok((v.to_string(), mine_vehicle(g, v, days, cfg)?))).collect()
}

pub fn label_map(profiles: &BTreeMap<String, MobilityProfile>) -> BTreeMap<String, String> {
    profiles.iter().map(|(v, p)| (v.clone(), p.label.as_str().to_string())).collect()
}

pub const PROFILE_COLUMNS: [&str; 11] = [
    "vehicle",
    "freq_class",
    "time_conc",
    "origin_conc",
    "dest_conc",
    "S_d",
    "score_ot",
    "score_dt",
    "score_od",
    "S_am",
    "label",
];

pub fn write_profiles<'a, W: Write>(sink: W, profiles: impl IntoIterator<Item = &'a MobilityProfile>) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(PROFILE_COLUMNS)?;
    for p in profiles {
        w.write_record([
            p.vehicle.clone(),
            p.freq_class.as_str().to_string(),
            p.time_concentration.code().to_string(),
            p.origin_concentration.code().to_string(),
            p.destination_concentration.code().to_string(),
            p.s_d.to_string(),
            format!("{:.4}", p.score_origin_time),
            format!("{:.4}", p.score_destination_time),
            format!("{:.4}", p.score_od),
            format!("{:.4}", p.s_am),
            p.label.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Share of vehicles and of trips per label, in percent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelShare {
    pub label: MobilityLabel,
    pub vehicles: usize,
    pub trips: usize,
    pub vehicle_share: f64,
    pub trip_share: f64,
}

pub fn label_summary(profiles: &BTreeMap<String, MobilityProfile>) -> Vec<LabelShare> {
    let total_v = profiles.len().max(1) as f64;
    let total_t = profiles.values().map(|p| p.trip_count).sum::<usize>().max(1) as f64;
    MobilityLabel::ALL
        .into_iter()
        .map(|label| {
            let (vehicles, trips) = profiles
                .values()
                .filter(|p| p.label == label)
                .fold((0, 0), |(v, t), p| (v + 1, t + p.trip_count));
            LabelShare {
                label,
                vehicles,
                trips,
                vehicle_share: 100.0 * vehicles as f64 / total_v,
                trip_share: 100.0 * trips as f64 / total_t,
            }
        })
        .collect()
}
