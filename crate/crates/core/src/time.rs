use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const SECONDS_PER_DAY: u32 = 86_400;

/// Seconds since midnight. `24:00:00` is representable so that time-span
/// bounds can close the day; trip times are always below it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TimeOfDay(u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTimeError(pub String);

impl fmt::Display for ParseTimeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid time of day `{}`", self.0)
    }
}

impl std::error::Error for ParseTimeError {}

impl TimeOfDay {
    pub const MIDNIGHT: TimeOfDay = TimeOfDay(0);
    pub const END_OF_DAY: TimeOfDay = TimeOfDay(SECONDS_PER_DAY);

    pub fn from_seconds(secs: u32) -> Option<Self> {
        (secs <= SECONDS_PER_DAY).then_some(TimeOfDay(secs))
    }

    pub fn from_hms(h: u32, m: u32, s: u32) -> Option<Self> {
        if m > 59 || s > 59 {
            return None;
        }
        Self::from_seconds(h * 3600 + m * 60 + s)
    }

    pub fn seconds(self) -> u32 {
        self.0
    }

    /// Parses `HH:MM:SS` as a trip time; `24:00:00` and later are rejected.
    pub fn parse_trip_time(s: &str) -> Result<Self, ParseTimeError> {
        let t = Self::parse_bound(s)?;
        if t.0 >= SECONDS_PER_DAY {
            return Err(ParseTimeError(s.to_string()));
        }
        Ok(t)
    }

    /// Parses `HH:MM:SS` or `HH:MM`, allowing exactly `24:00:00` as a day bound.
    pub fn parse_bound(s: &str) -> Result<Self, ParseTimeError> {
        let err = || ParseTimeError(s.to_string());
        let mut parts = s.trim().split(':');
        let mut field = |required: bool| -> Result<u32, ParseTimeError> {
            match parts.next() {
                Some(p) if (1..=2).contains(&p.len()) && p.bytes().all(|b| b.is_ascii_digit()) => {
                    p.parse().map_err(|_| err())
                }
                None if !required => Ok(0),
                _ => Err(err()),
            }
        };
        let h = field(true)?;
        let m = field(true)?;
        let sec = field(false)?;
        if parts.next().is_some() {
            return Err(err());
        }
        Self::from_hms(h, m, sec).ok_or_else(err)
    }
}

impl fmt::Display for TimeOfDay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (h, m, s) = (self.0 / 3600, (self.0 / 60) % 60, self.0 % 60);
        write!(f, "{h:02}:{m:02}:{s:02}")
    }
}

impl FromStr for TimeOfDay {
    type Err = ParseTimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_bound(s)
    }
}

impl Serialize for TimeOfDay {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TimeOfDay {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
