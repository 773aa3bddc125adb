//! CSV trip records: parsing, validation and normalisation.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::Serialize;

use crate::config::{parse_date, CalendarConfig, TimeSpanConfig, Week, DATE_FORMAT};
use crate::error::{Error, Result};
use crate::time::TimeOfDay;

/// Column names, in canonical output order.
pub const COLUMNS: [&str; 5] = ["vehicle", "date", "ftime", "fzone", "tzone"];

/// One cleaned trip row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TripRecord {
    pub vehicle: String,
    pub date: NaiveDate,
    pub ftime: TimeOfDay,
    pub fzone: String,
    pub tzone: String,
}

impl TripRecord {
    pub fn new(vehicle: &str, date: &str, ftime: &str, fzone: &str, tzone: &str) -> Result<Self> {
        Ok(TripRecord {
            vehicle: vehicle.to_string(),
            date: parse_date(date).ok_or_else(|| Error::InvalidArgument(format!("bad date `{date}`")))?,
            ftime: TimeOfDay::parse_trip_time(ftime).map_err(|e| Error::InvalidArgument(e.to_string()))?,
            fzone: fzone.to_string(),
            tzone: tzone.to_string(),
        })
    }

    pub fn date_key(&self) -> String {
        self.date.format(DATE_FORMAT).to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    WrongFieldCount,
    BadEncoding,
    EmptyField,
    BadDate,
    BadTime,
    UnknownZone,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::WrongFieldCount => "wrong-field-count",
            RejectReason::BadEncoding => "bad-encoding",
            RejectReason::EmptyField => "empty-field",
            RejectReason::BadDate => "bad-date",
            RejectReason::BadTime => "bad-time",
            RejectReason::UnknownZone => "unknown-zone",
        })
    }
}

/// `row` is the 1-based data row number (the header is not counted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedRow {
    pub row: usize,
    pub reason: RejectReason,
}

#[derive(Debug, Default)]
pub struct ParseOutcome {
    pub records: Vec<TripRecord>,
    pub rejected: Vec<RejectedRow>,
}

impl ParseOutcome {
    pub fn rows_seen(&self) -> usize {
        self.records.len() + self.rejected.len()
    }
}

/// Parses a trip CSV. Columns are located by header name (case-insensitive,
/// any order, extra columns ignored). Malformed rows are rejected with a
/// reason; only I/O failures and a missing required column are fatal.
pub fn parse_records<R: Read>(source: R, zone_whitelist: Option<&BTreeSet<String>>) -> Result<ParseOutcome> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(source);
    let header = reader.byte_headers()?.clone();
    let mut positions = [0usize; 5];
    for (slot, name) in positions.iter_mut().zip(COLUMNS) {
        *slot = header
            .iter()
            .position(|h| std::str::from_utf8(h).is_ok_and(|h| h.trim().eq_ignore_ascii_case(name)))
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
    }

    let mut out = ParseOutcome::default();
    let mut raw = csv::ByteRecord::new();
    let mut row = 0usize;
    loop {
        match reader.read_byte_record(&mut raw) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) if e.is_io_error() => return Err(e.into()),
            Err(_) => {
                row += 1;
                out.rejected.push(RejectedRow { row, reason: RejectReason::BadEncoding });
                continue;
            }
        }
        row += 1;
        match validate_row(&raw, &positions, header.len(), zone_whitelist) {
            Ok(rec) => out.records.push(rec),
            Err(reason) => out.rejected.push(RejectedRow { row, reason }),
        }
    }
    Ok(out)
}

fn validate_row(
    raw: &csv::ByteRecord,
    positions: &[usize; 5],
    width: usize,
    zone_whitelist: Option<&BTreeSet<String>>,
) -> std::result::Result<TripRecord, RejectReason> {
    if raw.len() != width {
        return Err(RejectReason::WrongFieldCount);
    }
    let mut fields = [""; 5];
    for (f, &pos) in fields.iter_mut().zip(positions) {
        *f = std::str::from_utf8(&raw[pos]).map_err(|_| RejectReason::BadEncoding)?.trim();
        if f.is_empty() {
            return Err(RejectReason::EmptyField);
        }
    }
    let [vehicle, date, ftime, fzone, tzone] = fields;
    let date = parse_date(date).ok_or(RejectReason::BadDate)?;
    let ftime = TimeOfDay::parse_trip_time(ftime).map_err(|_| RejectReason::BadTime)?;
    if let Some(zones) = zone_whitelist {
        if !zones.contains(fzone) || !zones.contains(tzone) {
            return Err(RejectReason::UnknownZone);
        }
    }
    Ok(TripRecord { vehicle: vehicle.to_string(), date, ftime, fzone: fzone.to_string(), tzone: tzone.to_string() })
}

pub fn write_records<W: Write>(sink: W, records: &[TripRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record([r.vehicle.as_str(), &r.date_key(), &r.ftime.to_string(), &r.fzone, &r.tzone])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rejects<W: Write>(sink: W, rejected: &[RejectedRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["row", "reason"])?;
    for r in rejected {
        w.write_record([r.row.to_string(), r.reason.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn map_week(date: NaiveDate, cal: &CalendarConfig) -> Week {
    cal.map_week(date)
}

pub fn map_timespan(t: TimeOfDay, cfg: &TimeSpanConfig) -> &str {
    cfg.map_timespan(t)
}
