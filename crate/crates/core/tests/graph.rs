mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use tripkg::config::{CalendarConfig, TimeSpanConfig};
use tripkg::ingest::TripRecord;
use tripkg::kg::build_graph;
use tripkg::{EntityType, Relation, TripKG};

fn record() -> impl Strategy<Value = TripRecord> {
    (0u32..12, 1u32..8, 0u32..86_400, 0u32..6, 0u32..6).prop_map(|(v, d, t, o, z)| {
        let ftime = format!("{:02}:{:02}:{:02}", t / 3600, t / 60 % 60, t % 60);
        TripRecord::new(&format!("V{v:02}"), &format!("2019-08-{d:02}"), &ftime, &format!("Z{o}"), &format!("Z{z}")).unwrap()
    })
}

fn records() -> impl Strategy<Value = Vec<TripRecord>> {
    prop::collection::vec(record(), 0..60)
}

fn build(recs: &[TripRecord]) -> TripKG {
    build_graph(recs, &CalendarConfig::default(), &TimeSpanConfig::default())
}

proptest! {
    #[test]
    fn six_triples_per_trip(recs in records()) {
        let g = build(&recs);
        prop_assert_eq!(g.entity_count(EntityType::Trip), recs.len());
        prop_assert_eq!(g.total_triples(), 6 * recs.len());
        for rel in Relation::TRIP_ATTRIBUTES {
            prop_assert_eq!(g.triple_count(rel), recs.len());
        }
        prop_assert_eq!(g.triple_count(Relation::TripType), 0);
        g.check_schema().unwrap();
    }

    #[test]
    fn tsv_round_trip(recs in records()) {
        let g = build(&recs);
        let (t, p) = (g.triples_tsv(), g.properties_tsv());
        let back = TripKG::read_tsv(t.as_bytes(), p.as_bytes()).unwrap();
        prop_assert_eq!(back.triples_tsv(), t);
        prop_assert_eq!(back.properties_tsv(), p);
        prop_assert_eq!(back.adjacency_signature(), g.adjacency_signature());
    }

    #[test]
    fn input_order_does_not_matter(recs in records(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = recs.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        // records identical in every field may swap keys; the exports still agree
        prop_assert_eq!(build(&shuffled).triples_tsv(), build(&recs).triples_tsv());
    }

    #[test]
    fn vehicle_trips_are_chronological(recs in records()) {
        let g = build(&recs);
        for v in g.keys_of(EntityType::Vehicle) {
            let trips = g.vehicle_trips(v).unwrap();
            for w in trips.windows(2) {
                prop_assert!((w[0].date, w[0].ftime) <= (w[1].date, w[1].ftime));
            }
            let expected = recs.iter().filter(|r| r.vehicle == v).count();
            prop_assert_eq!(trips.len(), expected);
        }
    }

    #[test]
    fn subgraphs_partition_trips(recs in records(), labels in prop::collection::vec(0usize..3, 12)) {
        let mut g = build(&recs);
        let total = g.entity_count(EntityType::Trip);
        let by_date: usize = g.dates().iter().map(|d| g.date_subgraph(d).entity_count(EntityType::Trip)).sum();
        prop_assert_eq!(by_date, total);

        let names = ["A", "B", "C"];
        let map: BTreeMap<String, String> = g
            .keys_of(EntityType::Vehicle)
            .map(|v| {
                let i: usize = v[1..].parse().unwrap();
                (v.to_string(), names[labels[i]].to_string())
            })
            .collect();
        g.attach_labels(&map).unwrap();
        g.check_schema().unwrap();
        prop_assert_eq!(g.triple_count(Relation::TripType), map.len());
        let mut by_label = 0;
        for l in g.label_names() {
            let sub = g.label_subgraph(&l).unwrap();
            sub.check_schema().unwrap();
            by_label += sub.entity_count(EntityType::Trip);
        }
        prop_assert_eq!(by_label, total);
    }
}

#[test]
fn trips_of_unknown_vehicle_is_an_error() {
    let g = common::graph(&[("V1", "2019-08-01", "08:00:00", "Z1", "Z2")]);
    assert!(g.vehicle_trips("V9").is_err());
}

#[test]
fn malformed_tsv_is_rejected() {
    assert!(TripKG::read_tsv("Vehicle\tV1\thastrip\tTrip".as_bytes(), "".as_bytes()).is_err());
    assert!(TripKG::read_tsv("Vehicle\tV1\tnope\tTrip\tT1".as_bytes(), "".as_bytes()).is_err());
    // a vehicle with a trip that has no attributes breaks the schema
    assert!(TripKG::read_tsv("Vehicle\tV1\thastrip\tTrip\tT1".as_bytes(), "".as_bytes()).is_err());
}
