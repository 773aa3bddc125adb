//! Pipeline configuration.
//!
//! One TOML file holds every tunable of the pipeline. Omitted sections and
//! keys fall back to the defaults below, so an empty file is a valid config:
//!
//! ```toml
//! [paths]
//! input = "corpus.csv"
//! workdir = "work"
//!
//! [calendar]
//! holiday_weekdays = ["Sat", "Sun"]
//! holidays = ["2019-08-15"]
//!
//! [[timespans]]
//! name = "EarlyMorning"
//! start = "00:00:00"
//! end = "07:00:00"
//! # ... further spans, chronological, covering the whole day
//!
//! [mining]
//! freq_extremely_low = 0.16
//! freq_low = 1.5
//! freq_high = 6.7
//! theta_am = 60.0
//! theta_d = 4
//! rho = 0.25
//! association_formula = "capped"   # or "literal"
//! # day_count = 35                 # default: first..last date of the corpus
//!
//! [association]
//! depth = 3
//! match = "same_trip"              # or "same_day"
//!
//! [generation]
//! beam_width = 8
//! early_exit_epsilon = 1e-3
//! seed = 20190801
//! keep_mapping = false
//!
//! [evaluation]
//! smoothing = 1e-9
//! top_k = 500
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::time::TimeOfDay;

pub const DATE_FORMAT: &str = "%Y-%m-%d";

pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    // chrono accepts unpadded fields; ISO dates here are strictly 10 chars.
    if s.len() != 10 {
        return None;
    }
    NaiveDate::parse_from_str(s, DATE_FORMAT).ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Week {
    Workday,
    Holiday,
}

impl Week {
    pub fn as_str(self) -> &'static str {
        match self {
            Week::Workday => "workday",
            Week::Holiday => "holiday",
        }
    }
}

impl fmt::Display for Week {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCalendar", into = "RawCalendar")]
pub struct CalendarConfig {
    pub holiday_weekdays: BTreeSet<u32>,
    pub holidays: BTreeSet<NaiveDate>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawCalendar {
    holiday_weekdays: Vec<String>,
    holidays: Vec<String>,
}

impl Default for RawCalendar {
    fn default() -> Self {
        CalendarConfig::default().into()
    }
}

const WEEKDAY_NAMES: [&str; 7] = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"];

impl TryFrom<RawCalendar> for CalendarConfig {
    type Error = String;

    fn try_from(raw: RawCalendar) -> std::result::Result<Self, String> {
        let holiday_weekdays = raw
            .holiday_weekdays
            .iter()
            .map(|name| {
                WEEKDAY_NAMES
                    .iter()
                    .position(|w| w.eq_ignore_ascii_case(name.get(..3).unwrap_or(name)))
                    .map(|i| i as u32)
                    .ok_or_else(|| format!("unknown weekday `{name}`"))
            })
            .collect::<std::result::Result<_, _>>()?;
        let holidays = raw
            .holidays
            .iter()
            .map(|d| parse_date(d).ok_or_else(|| format!("invalid holiday date `{d}`")))
            .collect::<std::result::Result<_, _>>()?;
        Ok(CalendarConfig { holiday_weekdays, holidays })
    }
}

impl From<CalendarConfig> for RawCalendar {
    fn from(cal: CalendarConfig) -> Self {
        RawCalendar {
            holiday_weekdays: cal
                .holiday_weekdays
                .iter()
                .map(|&i| WEEKDAY_NAMES[i as usize].to_string())
                .collect(),
            holidays: cal.holidays.iter().map(|d| d.format(DATE_FORMAT).to_string()).collect(),
        }
    }
}

impl Default for CalendarConfig {
    fn default() -> Self {
        CalendarConfig {
            holiday_weekdays: [Weekday::Sat, Weekday::Sun]
                .iter()
                .map(|w| w.num_days_from_monday())
                .collect(),
            holidays: BTreeSet::new(),
        }
    }
}

impl CalendarConfig {
    /// Explicit holiday dates win over the weekday rule.
    pub fn map_week(&self, date: NaiveDate) -> Week {
        if self.holidays.contains(&date)
            || self.holiday_weekdays.contains(&date.weekday().num_days_from_monday())
        {
            Week::Holiday
        } else {
            Week::Workday
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeSpan {
    pub name: String,
    pub start: TimeOfDay,
    pub end: TimeOfDay,
}

impl TimeSpan {
    fn new(name: &str, start: &str, end: &str) -> Self {
        TimeSpan {
            name: name.to_string(),
            start: start.parse().expect("static span bound"),
            end: end.parse().expect("static span bound"),
        }
    }

    pub fn contains(&self, t: TimeOfDay) -> bool {
        self.start <= t && t < self.end
    }
}

/// Chronological partition of the day. Index order is the dimension order of
/// every per-span vector downstream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<TimeSpan>", into = "Vec<TimeSpan>")]
pub struct TimeSpanConfig {
    spans: Vec<TimeSpan>,
}

impl Default for TimeSpanConfig {
    fn default() -> Self {
        TimeSpanConfig {
            spans: vec![
                TimeSpan::new("EarlyMorning", "00:00:00", "07:00:00"),
                TimeSpan::new("MorningPeak", "07:00:00", "09:30:00"),
                TimeSpan::new("Midday", "09:30:00", "16:30:00"),
                TimeSpan::new("EveningPeak", "16:30:00", "19:30:00"),
                TimeSpan::new("Night", "19:30:00", "24:00:00"),
            ],
        }
    }
}

impl TryFrom<Vec<TimeSpan>> for TimeSpanConfig {
    type Error = String;

    fn try_from(spans: Vec<TimeSpan>) -> std::result::Result<Self, String> {
        TimeSpanConfig::new(spans).map_err(|e| e.to_string())
    }
}

impl From<TimeSpanConfig> for Vec<TimeSpan> {
    fn from(cfg: TimeSpanConfig) -> Self {
        cfg.spans
    }
}

impl TimeSpanConfig {
    pub fn new(spans: Vec<TimeSpan>) -> Result<Self> {
        let bad = |msg: String| Err(Error::Config(format!("time spans: {msg}")));
        if spans.is_empty() {
            return bad("at least one span is required".into());
        }
        let mut names = BTreeSet::new();
        let mut expected_start = TimeOfDay::MIDNIGHT;
        for span in &spans {
            if span.name.trim().is_empty() || !names.insert(span.name.as_str()) {
                return bad(format!("span names must be unique and non-empty (`{}`)", span.name));
            }
            if span.start != expected_start {
                return bad(format!("`{}` starts at {}, expected {expected_start}", span.name, span.start));
            }
            if span.end <= span.start {
                return bad(format!("`{}` is empty or reversed", span.name));
            }
            expected_start = span.end;
        }
        if expected_start != TimeOfDay::END_OF_DAY {
            return bad(format!("spans end at {expected_start}, expected 24:00:00"));
        }
        Ok(TimeSpanConfig { spans })
    }

    pub fn spans(&self) -> &[TimeSpan] {
        &self.spans
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn index_of(&self, t: TimeOfDay) -> usize {
        // Spans are contiguous and sorted, so the containing span is the
        // last one starting at or before `t`.
        let t = t.min(TimeOfDay::from_seconds(crate::time::SECONDS_PER_DAY - 1).unwrap());
        self.spans.partition_point(|s| s.start <= t) - 1
    }

    pub fn map_timespan(&self, t: TimeOfDay) -> &str {
        &self.spans[self.index_of(t)].name
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.spans.iter().position(|s| s.name == name)
    }

    pub fn get(&self, name: &str) -> Option<&TimeSpan> {
        self.spans.iter().find(|s| s.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.spans.iter().map(|s| s.name.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AssociationFormula {
    /// Row term capped at the row total.
    #[default]
    Capped,
    /// Row term capped at 1, as printed.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MiningConfig {
    pub freq_extremely_low: f64,
    pub freq_low: f64,
    pub freq_high: f64,
    pub theta_am: f64,
    pub theta_d: u8,
    pub rho: f64,
    pub association_formula: AssociationFormula,
    pub day_count: Option<u32>,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            freq_extremely_low: 0.16,
            freq_low: 1.5,
            freq_high: 6.7,
            theta_am: 60.0,
            theta_d: 4,
            rho: 0.25,
            association_formula: AssociationFormula::Capped,
            day_count: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AssociationMatch {
    /// The same pair of trips must share the span and a zone.
    #[default]
    SameTrip,
    /// Span and zone coincidences may come from different trips of the day.
    SameDay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssociationConfig {
    pub depth: usize,
    #[serde(rename = "match")]
    pub match_mode: AssociationMatch,
}

impl Default for AssociationConfig {
    fn default() -> Self {
        AssociationConfig { depth: 3, match_mode: AssociationMatch::SameTrip }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationConfig {
    pub beam_width: usize,
    pub early_exit_epsilon: f64,
    pub seed: Option<u64>,
    pub keep_mapping: bool,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig { beam_width: 8, early_exit_epsilon: 1e-3, seed: None, keep_mapping: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    pub smoothing: f64,
    pub top_k: usize,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig { smoothing: 1e-9, top_k: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub input: Option<PathBuf>,
    pub workdir: PathBuf,
    pub zone_whitelist: Option<Vec<String>>,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig { input: None, workdir: PathBuf::from("work"), zone_whitelist: None }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: PathsConfig,
    pub calendar: CalendarConfig,
    pub timespans: TimeSpanConfig,
    pub mining: MiningConfig,
    pub association: AssociationConfig,
    pub generation: GenerationConfig,
    pub evaluation: EvaluationConfig,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.mining;
        let check = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(Error::Config(msg.to_string())) };
        check(
            0.0 <= m.freq_extremely_low && m.freq_extremely_low < m.freq_low && m.freq_low < m.freq_high,
            "mining: need 0 <= freq_extremely_low < freq_low < freq_high",
        )?;
        check((0.0..=100.0).contains(&m.theta_am), "mining: theta_am must lie in [0, 100]")?;
        check(m.theta_d <= 6, "mining: theta_d must lie in 0..=6")?;
        check(m.rho > 0.0 && m.rho <= 1.0, "mining: rho must lie in (0, 1]")?;
        check(m.day_count != Some(0), "mining: day_count must be positive")?;
        check(self.association.depth >= 1, "association: depth must be >= 1")?;
        check(self.association.depth < 200, "association: depth must be < 200")?;
        check(self.generation.beam_width >= 1, "generation: beam_width must be >= 1")?;
        check(self.generation.early_exit_epsilon >= 0.0, "generation: early_exit_epsilon must be >= 0")?;
        check(self.evaluation.smoothing > 0.0, "evaluation: smoothing must be > 0")?;
        check(self.evaluation.top_k >= 1, "evaluation: top_k must be >= 1")?;
        Ok(())
    }
}
