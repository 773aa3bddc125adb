use proptest::prelude::*;

use tripkg::config::{parse_date, CalendarConfig, TimeSpan, TimeSpanConfig, Week};
use tripkg::ingest::{map_timespan, map_week, parse_records, write_records, RejectReason, TripRecord};
use tripkg::time::TimeOfDay;

/// Day of week by Sakamoto's method, 0 = Sunday.
fn weekday(y: i32, m: u32, d: u32) -> u32 {
    const T: [i32; 12] = [0, 3, 2, 5, 0, 3, 5, 1, 4, 6, 2, 4];
    let y = if m < 3 { y - 1 } else { y };
    ((y + y / 4 - y / 100 + y / 400 + T[m as usize - 1] + d as i32) % 7) as u32
}

fn days_in(y: i32, m: u32) -> u32 {
    match m {
        2 if (y % 4 == 0 && y % 100 != 0) || y % 400 == 0 => 29,
        2 => 28,
        4 | 6 | 9 | 11 => 30,
        _ => 31,
    }
}

fn record() -> impl Strategy<Value = TripRecord> {
    ("[A-Za-z0-9]{1,8}", 2000i32..2030, 1u32..13, 0u32..86_400, "Z[0-9]{1,3}", "Z[0-9]{1,3}").prop_flat_map(
        |(v, y, m, t, o, z)| {
            (1..=days_in(y, m)).prop_map(move |d| {
                let time = format!("{:02}:{:02}:{:02}", t / 3600, t / 60 % 60, t % 60);
                TripRecord::new(&v, &format!("{y:04}-{m:02}-{d:02}"), &time, &o, &z).unwrap()
            })
        },
    )
}

proptest! {
    #[test]
    fn csv_round_trip(recs in prop::collection::vec(record(), 0..40)) {
        let mut buf = Vec::new();
        write_records(&mut buf, &recs).unwrap();
        let back = parse_records(buf.as_slice(), None).unwrap();
        prop_assert!(back.rejected.is_empty());
        prop_assert_eq!(back.records, recs);
    }

    #[test]
    fn default_week_rule_matches_civil_calendar(y in 1990i32..2060, m in 1u32..13, d in 1u32..29) {
        let date = parse_date(&format!("{y:04}-{m:02}-{d:02}")).unwrap();
        let want = if matches!(weekday(y, m, d), 0 | 6) { Week::Holiday } else { Week::Workday };
        prop_assert_eq!(map_week(date, &CalendarConfig::default()), want);
    }

    #[test]
    fn every_time_maps_to_the_span_containing_it(t in 0u32..86_400) {
        let spans = TimeSpanConfig::default();
        let time = TimeOfDay::from_seconds(t).unwrap();
        let name = map_timespan(time, &spans);
        prop_assert!(spans.get(name).unwrap().contains(time));
        prop_assert_eq!(spans.spans().iter().filter(|s| s.contains(time)).count(), 1);
    }
}

fn span(name: &str, start: &str, end: &str) -> TimeSpan {
    TimeSpan { name: name.into(), start: TimeOfDay::parse_bound(start).unwrap(), end: TimeOfDay::parse_bound(end).unwrap() }
}

#[test]
fn canonical_row_parses() {
    let out = parse_records("vehicle,date,ftime,fzone,tzone\nV1,2019-08-01,09:30:00,Z3,Z7\n".as_bytes(), None).unwrap();
    assert_eq!(out.records, vec![TripRecord::new("V1", "2019-08-01", "09:30:00", "Z3", "Z7").unwrap()]);
    let spans = TimeSpanConfig::new(vec![
        span("Early", "00:00:00", "07:00:00"),
        span("MorningPeak", "07:00:00", "10:00:00"),
        span("Rest", "10:00:00", "24:00:00"),
    ])
    .unwrap();
    assert_eq!(map_timespan(out.records[0].ftime, &spans), "MorningPeak");
    let defaults = TimeSpanConfig::default();
    assert_eq!(map_timespan(TimeOfDay::from_hms(0, 0, 0).unwrap(), &defaults), "EarlyMorning");
    assert_eq!(map_timespan(TimeOfDay::from_hms(23, 59, 59).unwrap(), &defaults), "Night");
}

#[test]
fn malformed_rows_are_rejected_not_fatal() {
    let text = "vehicle,date,ftime,fzone,tzone\n\
                V1,2019-08-01,25:00:00,Z3,Z7\n\
                V1,2019-02-30,09:00:00,Z3,Z7\n\
                V1,2019-08-01,09:00:00,,Z7\n\
                V1,2019-08-01,09:00:00,Z3\n\
                V1,2019-08-01,09:00:00,Z3,Z7\n";
    let out = parse_records(text.as_bytes(), None).unwrap();
    let reasons: Vec<_> = out.rejected.iter().map(|r| (r.row, r.reason.clone())).collect();
    assert_eq!(
        reasons,
        vec![
            (1, RejectReason::BadTime),
            (2, RejectReason::BadDate),
            (3, RejectReason::EmptyField),
            (4, RejectReason::WrongFieldCount),
        ]
    );
    assert_eq!(out.records.len(), 1);
}

#[test]
fn header_only_and_missing_column() {
    let out = parse_records("vehicle,date,ftime,fzone,tzone\n".as_bytes(), None).unwrap();
    assert_eq!(out.rows_seen(), 0);
    assert!(parse_records("vehicle,date,ftime,fzone\n".as_bytes(), None).is_err());
}

#[test]
fn weekday_spot_checks() {
    let cal = CalendarConfig::default();
    assert_eq!(map_week(parse_date("2019-08-03").unwrap(), &cal), Week::Holiday);
    assert_eq!(map_week(parse_date("2019-08-01").unwrap(), &cal), Week::Workday);
}
