//! Synthetic trip corpus with planted mobility cohorts.
//!
//! Cohorts:
//! * commuters: home to work every workday morning; the evening return is
//!   observed on only one workday in five (roadside sensors miss most return
//!   legs), and about a third of observed returns start from a third zone,
//! * passing vehicles: exactly one trip in the window,
//! * high-frequency vehicles: 7 to 9 trips every day on chains that mostly
//!   thread (the next origin is the previous destination),
//! * random vehicles: about 1.2 trips a day on loosely threaded chains,
//! * stable vehicles: a midday shuttle between two zones with the evening
//!   return leg.
//!
//! Trip times are drawn inside fixed windows that agree with the default
//! time spans.

use std::collections::BTreeMap;
use std::io::Write;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::parse_date;
use crate::error::{Error, Result};
use crate::ingest::TripRecord;
use crate::mining::MobilityLabel;
use crate::time::TimeOfDay;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub seed: u64,
    pub start_date: String,
    pub days: u32,
    pub zones: usize,
    /// Zones `Z01..` up to this count are work destinations.
    pub work_zones: usize,
    pub commuters: usize,
    pub passing: usize,
    pub high_frequency: usize,
    pub random: usize,
    pub stable: usize,
    /// Probability that a chained trip starts away from the last destination.
    pub chain_break: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            seed: 20190801,
            start_date: "2019-08-01".into(),
            days: 14,
            zones: 24,
            work_zones: 6,
            commuters: 100,
            passing: 280,
            high_frequency: 50,
            random: 50,
            stable: 20,
            chain_break: 0.35,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub records: Vec<TripRecord>,
    pub truth: BTreeMap<String, MobilityLabel>,
}

impl SynthSpec {
    pub fn vehicle_count(&self) -> usize {
        self.commuters + self.passing + self.high_frequency + self.random + self.stable
    }

    fn dates(&self) -> Result<Vec<NaiveDate>> {
        let start = parse_date(&self.start_date)
            .ok_or_else(|| Error::InvalidArgument(format!("bad start date `{}`", self.start_date)))?;
        (0..self.days as u64)
            .map(|i| start.checked_add_days(Days::new(i)).ok_or_else(|| Error::InvalidArgument("date overflow".into())))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("infeasible corpus spec: {m}")));
        if self.vehicle_count() == 0 {
            return bad("no vehicles");
        }
        if self.zones < 3 || self.work_zones == 0 || self.work_zones >= self.zones {
            return bad("need at least 3 zones and 1 <= work_zones < zones");
        }
        if self.zones > 99 {
            return bad("at most 99 zones");
        }
        if !(0.0..=1.0).contains(&self.chain_break) {
            return bad("chain_break must be in [0, 1]");
        }
        // one trip in the window must stay at or below 0.16 trips/day
        if self.passing > 0 && self.days < 7 {
            return bad("passing vehicles need a window of at least 7 days");
        }
        let workdays = self.dates()?.iter().filter(|d| is_workday(**d)).count();
        if self.commuters > 0 && workdays < 5 {
            return bad("commuters need at least 5 workdays");
        }
        if self.days == 0 {
            return bad("empty window");
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<Corpus> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let dates = self.dates()?;
        let zones: Vec<String> = (1..=self.zones).map(|i| format!("Z{i:02}")).collect();
        let (work, home) = zones.split_at(self.work_zones);

        let mut cohorts: Vec<MobilityLabel> = Vec::new();
        for (n, l) in [
            (self.commuters, MobilityLabel::Commuter),
            (self.passing, MobilityLabel::PassingVehicle),
            (self.high_frequency, MobilityLabel::VehicleOfHighFrequency),
            (self.random, MobilityLabel::VehicleOfRandom),
            (self.stable, MobilityLabel::VehicleOfStable),
        ] {
            cohorts.extend(std::iter::repeat_n(l, n));
        }
        cohorts.shuffle(&mut rng);

        let width = self.vehicle_count().to_string().len().max(4);
        let mut records = Vec::new();
        let mut truth = BTreeMap::new();
        for (i, label) in cohorts.into_iter().enumerate() {
            let v = format!("V{:0width$}", i + 1);
            let mut trips = match label {
                MobilityLabel::Commuter => commuter(&mut rng, &dates, work, home, &zones),
                MobilityLabel::PassingVehicle => passing(&mut rng, &dates, &zones),
                MobilityLabel::VehicleOfHighFrequency => chained(&mut rng, &dates, &zones, self.chain_break, |r| r.gen_range(7..=9)),
                // 0, 1, 2, 3 trips with weights 7:5:5:3, mean 1.2
                MobilityLabel::VehicleOfRandom => {
                    chained(&mut rng, &dates, &zones, self.chain_break, |r| match r.gen_range(0..20) {
                        0..=6 => 0,
                        7..=11 => 1,
                        12..=16 => 2,
                        _ => 3,
                    })
                }
                MobilityLabel::VehicleOfStable => stable(&mut rng, &dates, &zones),
            };
            trips.sort();
            for (d, t, o, z) in trips {
                records.push(TripRecord { vehicle: v.clone(), date: d, ftime: t, fzone: o, tzone: z });
            }
            truth.insert(v, label);
        }
        records.sort_by(|a, b| (a.date, a.ftime, &a.vehicle).cmp(&(b.date, b.ftime, &b.vehicle)));
        Ok(Corpus { records, truth })
    }
}

type Trip = (NaiveDate, TimeOfDay, String, String);

fn is_workday(d: NaiveDate) -> bool {
    !matches!(d.weekday(), Weekday::Sat | Weekday::Sun)
}

fn time_in<R: Rng>(rng: &mut R, from: (u32, u32), to: (u32, u32)) -> TimeOfDay {
    let a = from.0 * 3600 + from.1 * 60;
    let b = to.0 * 3600 + to.1 * 60;
    TimeOfDay::from_seconds(rng.gen_range(a..b)).expect("window inside the day")
}

fn other<R: Rng>(rng: &mut R, zones: &[String], not: &str) -> String {
    loop {
        let z = zones.choose(rng).expect("zones");
        if z != not {
            return z.clone();
        }
    }
}

fn commuter<R: Rng>(rng: &mut R, dates: &[NaiveDate], work: &[String], home: &[String], zones: &[String]) -> Vec<Trip> {
    let h = home.choose(rng).expect("home zones").clone();
    let w = work.choose(rng).expect("work zones").clone();
    let workdays: Vec<NaiveDate> = dates.iter().copied().filter(|d| is_workday(*d)).collect();
    let mut trips: Vec<Trip> =
        workdays.iter().map(|&d| (d, time_in(rng, (7, 0), (9, 30)), h.clone(), w.clone())).collect();
    for &d in workdays.choose_multiple(rng, workdays.len() / 5) {
        let from = if rng.gen_bool(0.35) { other(rng, zones, &h) } else { w.clone() };
        trips.push((d, time_in(rng, (16, 30), (19, 30)), from, h.clone()));
    }
    trips
}

fn passing<R: Rng>(rng: &mut R, dates: &[NaiveDate], zones: &[String]) -> Vec<Trip> {
    let d = *dates.choose(rng).expect("dates");
    let o = zones.choose(rng).expect("zones").clone();
    let z = other(rng, zones, &o);
    vec![(d, time_in(rng, (6, 0), (22, 0)), o, z)]
}

fn chained<R: Rng>(
    rng: &mut R,
    dates: &[NaiveDate],
    zones: &[String],
    chain_break: f64,
    per_day: impl Fn(&mut R) -> usize,
) -> Vec<Trip> {
    let mut trips = Vec::new();
    let mut pos: Option<String> = None;
    for &d in dates {
        let n = per_day(rng);
        let mut times: Vec<TimeOfDay> = (0..n).map(|_| time_in(rng, (6, 0), (23, 0))).collect();
        times.sort();
        for t in times {
            let o = match &pos {
                Some(p) if !rng.gen_bool(chain_break) => p.clone(),
                _ => zones.choose(rng).expect("zones").clone(),
            };
            let z = other(rng, zones, &o);
            pos = Some(z.clone());
            trips.push((d, t, o, z));
        }
    }
    trips
}

fn stable<R: Rng>(rng: &mut R, dates: &[NaiveDate], zones: &[String]) -> Vec<Trip> {
    let a = zones.choose(rng).expect("zones").clone();
    let b = other(rng, zones, &a);
    let mut trips = Vec::new();
    for &d in dates {
        trips.push((d, time_in(rng, (10, 0), (16, 0)), a.clone(), b.clone()));
        trips.push((d, time_in(rng, (17, 0), (19, 0)), b.clone(), a.clone()));
    }
    trips
}

pub fn write_truth<W: Write>(sink: W, truth: &BTreeMap<String, MobilityLabel>) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["vehicle", "label"])?;
    for (v, l) in truth {
        w.write_record([v.as_str(), l.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_truth<R: std::io::Read>(source: R) -> Result<BTreeMap<String, MobilityLabel>> {
    let mut r = csv::Reader::from_reader(source);
    let mut out = BTreeMap::new();
    for rec in r.records() {
        let rec = rec?;
        let (Some(v), Some(l)) = (rec.get(0), rec.get(1)) else {
            return Err(Error::InvalidArgument("ground truth rows need `vehicle,label`".into()));
        };
        out.insert(v.to_string(), l.parse()?);
    }
    Ok(out)
}

/// Per planted label: (planted vehicles, recovered with the same label).
pub fn recall(truth: &BTreeMap<String, MobilityLabel>, mined: &BTreeMap<String, String>) -> BTreeMap<MobilityLabel, (usize, usize)> {
    let mut out: BTreeMap<MobilityLabel, (usize, usize)> = BTreeMap::new();
    for (v, l) in truth {
        let e = out.entry(*l).or_default();
        e.0 += 1;
        e.1 += usize::from(mined.get(v).map(String::as_str) == Some(l.as_str()));
    }
    out
}
