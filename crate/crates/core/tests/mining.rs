mod common;

use proptest::prelude::*;

use tripkg::config::{AssociationFormula, MiningConfig};
use tripkg::mining::{
    assign_label, association_score, concentration, label_summary, mine_all, trip_frequency, ConcentrationLevel,
    FrequencyClass, MobilityLabel,
};

/// `n` trips for one vehicle, spread over the first days of August.
fn trips(n: usize) -> Vec<(String, String)> {
    (0..n).map(|i| (format!("2019-08-{:02}", i % 28 + 1), format!("{:02}:{:02}:00", 6 + i / 28 % 12, i % 60))).collect()
}

fn frequency_of(n: usize, days: u32) -> FrequencyClass {
    let owned = trips(n);
    let rows: Vec<_> = owned.iter().map(|(d, t)| ("V1", d.as_str(), t.as_str(), "Z1", "Z2")).collect();
    let g = common::graph(&rows);
    trip_frequency(&g, "V1", days, &MiningConfig::default()).unwrap()
}

#[test]
fn frequency_class_examples() {
    assert_eq!(frequency_of(5, 35), FrequencyClass::ExtremelyLow);
    assert_eq!(frequency_of(235, 35), FrequencyClass::High);
}

#[test]
fn zero_rate_is_extremely_low() {
    assert_eq!(FrequencyClass::classify(0.0, &MiningConfig::default()), FrequencyClass::ExtremelyLow);
}

#[test]
fn concentration_examples() {
    assert_eq!(concentration(&[10]).unwrap(), ConcentrationLevel::HighlyConcentrated);
    assert_eq!(concentration(&[8, 1, 1, 0, 0, 0, 0, 0, 0, 0]).unwrap(), ConcentrationLevel::HighlyConcentrated);
    assert_eq!(concentration(&[1; 10]).unwrap(), ConcentrationLevel::Dispersed);
    assert!(concentration(&[0, 0]).is_err());
}

#[test]
fn association_examples() {
    let s = |p: &[Vec<u64>]| association_score(p, 0.25, AssociationFormula::Capped).unwrap();
    assert_eq!(s(&[vec![4, 0], vec![0, 7]]), 100.0);
    assert!((s(&[vec![1; 10]]) - 10.0).abs() < 1e-12);
    assert_eq!(s(&[vec![28, 2]]), 100.0);
    assert!(association_score(&[vec![0]], 0.25, AssociationFormula::Capped).is_err());
}

#[test]
fn label_examples() {
    let cfg = MiningConfig::default();
    assert_eq!(assign_label(FrequencyClass::ExtremelyLow, 6, 100.0, &cfg), MobilityLabel::PassingVehicle);
    assert_eq!(assign_label(FrequencyClass::General, 6, 95.0, &cfg), MobilityLabel::Commuter);
    assert_eq!(assign_label(FrequencyClass::Low, 0, 5.0, &cfg), MobilityLabel::VehicleOfRandom);
}

#[test]
fn single_vehicle_graph_has_one_profile() {
    let g = common::graph(&[("V1", "2019-08-01", "08:00:00", "Z1", "Z2"), ("V1", "2019-08-02", "08:00:00", "Z1", "Z2")]);
    let profiles = mine_all(&g, &MiningConfig::default()).unwrap();
    assert_eq!(profiles.len(), 1);
    let p = &profiles["V1"];
    assert_eq!((p.trip_count, p.s_d), (2, 6));
    assert_eq!(p.s_am, 100.0);
}

fn counts() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..20, 1..12).prop_filter("needs a trip", |c| c.iter().any(|&x| x > 0))
}

fn matrix() -> impl Strategy<Value = Vec<Vec<u64>>> {
    (1usize..5, 1usize..6)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(0u64..9, c), r))
        .prop_filter("needs a trip", |m| m.iter().flatten().any(|&x| x > 0))
}

fn label_oracle(freq: FrequencyClass, s_d: u8, s_am: f64) -> MobilityLabel {
    // decision table written out row by row
    let table = [
        (true, true, MobilityLabel::Commuter),
        (true, false, MobilityLabel::VehicleOfStable),
        (false, true, MobilityLabel::VehicleOfStable),
        (false, false, MobilityLabel::VehicleOfRandom),
    ];
    match freq {
        FrequencyClass::ExtremelyLow => MobilityLabel::PassingVehicle,
        FrequencyClass::High => MobilityLabel::VehicleOfHighFrequency,
        _ => table.iter().find(|(a, d, _)| *a == (s_am >= 60.0) && *d == (s_d >= 4)).unwrap().2,
    }
}

proptest! {
    #[test]
    fn concentration_matches_subset_search(c in counts()) {
        prop_assert_eq!(concentration(&c).unwrap().code(), common::brute_concentration(&c));
    }

    #[test]
    fn concentration_ignores_order(c in counts(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut p = c.clone();
        p.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(concentration(&p).unwrap(), concentration(&c).unwrap());
    }

    #[test]
    fn adding_to_the_top_never_disperses(c in counts(), extra in 1u64..50) {
        let mut more = c.clone();
        let top = (0..more.len()).max_by_key(|&i| more[i]).unwrap();
        more[top] += extra;
        prop_assert!(concentration(&more).unwrap() >= concentration(&c).unwrap());
    }

    #[test]
    fn association_matches_cellwise_oracle(m in matrix(), rho in 0.01f64..1.0) {
        for (formula, capped) in [(AssociationFormula::Capped, true), (AssociationFormula::Literal, false)] {
            let s = association_score(&m, rho, formula).unwrap();
            prop_assert!((0.0..=100.0).contains(&s));
            prop_assert!((s - common::brute_association(&m, rho, capped)).abs() < 1e-9);
        }
    }

    #[test]
    fn association_ignores_row_and_column_order(m in matrix(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut rows = m.clone();
        rows.shuffle(&mut rng);
        for r in &mut rows {
            r.shuffle(&mut rng);
        }
        let a = association_score(&m, 0.25, AssociationFormula::Capped).unwrap();
        let b = association_score(&rows, 0.25, AssociationFormula::Capped).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn every_input_gets_the_decision_table_label(f in 0usize..4, s_d in 0u8..=6, s_am in 0.0f64..=100.0) {
        let freq = [FrequencyClass::ExtremelyLow, FrequencyClass::Low, FrequencyClass::General, FrequencyClass::High][f];
        prop_assert_eq!(assign_label(freq, s_d, s_am, &MiningConfig::default()), label_oracle(freq, s_d, s_am));
    }

    #[test]
    fn shares_sum_to_a_hundred(rows in prop::collection::vec((0u32..8, 1u32..10, 0u32..3), 1..40)) {
        let owned: Vec<_> = rows
            .iter()
            .enumerate()
            .map(|(i, (v, d, z))| (format!("V{v}"), format!("2019-08-{d:02}"), format!("{:02}:00:00", i % 24), format!("Z{z}")))
            .collect();
        let recs: Vec<_> = owned.iter().map(|(v, d, t, z)| (v.as_str(), d.as_str(), t.as_str(), z.as_str(), "Z9")).collect();
        let g = common::graph(&recs);
        let summary = label_summary(&mine_all(&g, &MiningConfig::default()).unwrap());
        let v: f64 = summary.iter().map(|s| s.vehicle_share).sum();
        let t: f64 = summary.iter().map(|s| s.trip_share).sum();
        prop_assert!((v - 100.0).abs() < 1e-9 && (t - 100.0).abs() < 1e-9);
        prop_assert_eq!(summary.iter().map(|s| s.trips).sum::<usize>(), rows.len());
    }
}
