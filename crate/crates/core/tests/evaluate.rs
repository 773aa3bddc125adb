mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tripkg::config::TimeSpanConfig;
use tripkg::evaluate::{
    bootstrap_kl_quantile, continuity_rate, kl_divergence, spatial_histograms, temporal_histogram, top_od_report,
};

fn hist() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..100.0, 1..16).prop_filter("needs mass", |h| h.iter().sum::<f64>() > 1e-3)
}

fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    hist().prop_flat_map(|p| {
        let n = p.len();
        (Just(p), prop::collection::vec(0.0f64..100.0, n).prop_filter("needs mass", |h| h.iter().sum::<f64>() > 1e-3))
    })
}

/// Cross entropy minus entropy, on the same smoothing.
fn kl_oracle(p: &[f64], q: &[f64], eps: f64) -> f64 {
    let norm = |h: &[f64]| {
        let t: f64 = h.iter().sum();
        let s: Vec<f64> = h.iter().map(|x| x / t + eps).collect();
        let z: f64 = s.iter().sum();
        s.into_iter().map(|x| x / z).collect::<Vec<_>>()
    };
    let (p, q) = (norm(p), norm(q));
    let cross: f64 = -p.iter().zip(&q).map(|(a, b)| a * b.ln()).sum::<f64>();
    let entropy: f64 = -p.iter().map(|a| a * a.ln()).sum::<f64>();
    cross - entropy
}

proptest! {
    #[test]
    fn kl_is_non_negative_and_matches_oracle((p, q) in pair()) {
        let k = kl_divergence(&p, &q, 1e-9).unwrap();
        prop_assert!(k >= 0.0);
        prop_assert!((k - kl_oracle(&p, &q, 1e-9).max(0.0)).abs() < 1e-9);
    }

    #[test]
    fn kl_of_a_histogram_with_itself_is_zero(p in hist(), scale in 0.1f64..10.0) {
        let scaled: Vec<f64> = p.iter().map(|x| x * scale).collect();
        prop_assert!(kl_divergence(&p, &scaled, 1e-9).unwrap() < 1e-12);
    }

    #[test]
    fn continuity_rate_counts_threaded_pairs(
        legs in prop::collection::vec((0u32..3, 1u32..3, 0u32..3, 0u32..3), 1..30),
    ) {
        let owned: Vec<_> = legs
            .iter()
            .enumerate()
            .map(|(i, (v, d, o, z))| (format!("V{v}"), format!("2019-08-{d:02}"), format!("{:02}:{:02}:00", i / 60, i % 60), format!("Z{o}"), format!("Z{z}")))
            .collect();
        let recs: Vec<_> = owned.iter().map(|(v, d, t, o, z)| (v.as_str(), d.as_str(), t.as_str(), o.as_str(), z.as_str())).collect();
        let g = common::graph(&recs);

        // input order is already chronological within each (vehicle, date)
        let (mut pairs, mut hits) = (0, 0);
        for (i, a) in owned.iter().enumerate() {
            if let Some(b) = owned[i + 1..].iter().find(|b| b.0 == a.0 && b.1 == a.1) {
                pairs += 1;
                hits += usize::from(a.4 == b.3);
            }
        }
        let want = (pairs > 0).then(|| hits as f64 / pairs as f64);
        prop_assert_eq!(continuity_rate(&g), want);
    }
}

#[test]
fn kl_worked_value() {
    let k = kl_divergence(&[1.0, 1.0], &[1.0, 3.0], 1e-12).unwrap();
    assert!((k - 0.5 * (4.0f64 / 3.0).ln()).abs() < 1e-9);
}

#[test]
fn threaded_chain_has_full_continuity() {
    let g = common::graph(&[
        ("V1", "2019-08-01", "07:00:00", "Z1", "Z2"),
        ("V1", "2019-08-01", "12:00:00", "Z2", "Z3"),
        ("V1", "2019-08-01", "18:00:00", "Z3", "Z1"),
    ]);
    assert_eq!(continuity_rate(&g), Some(1.0));
}

#[test]
fn identical_graphs_have_zero_divergence() {
    let g = common::graph(&[
        ("V1", "2019-08-01", "07:00:00", "Z1", "Z2"),
        ("V2", "2019-08-01", "12:00:00", "Z2", "Z3"),
        ("V3", "2019-08-02", "18:00:00", "Z3", "Z1"),
    ]);
    let spans = TimeSpanConfig::default();
    let h = temporal_histogram(&g, &spans);
    assert_eq!(h.iter().sum::<f64>(), 3.0);
    assert_eq!(kl_divergence(&h, &h, 1e-6).unwrap(), 0.0);
    let (keys, a, b) = spatial_histograms(&g, &g);
    assert_eq!(keys.len(), 3);
    assert_eq!(a, b);
    let top = top_od_report(&g, &g, 2).unwrap();
    assert_eq!(top.len(), 2);
    assert!(top.iter().all(|r| r.original_share == r.generated_share));
}

#[test]
fn top_od_is_ranked_by_original_share() {
    let o = common::graph(&[
        ("V1", "2019-08-01", "07:00:00", "Z1", "Z2"),
        ("V2", "2019-08-01", "07:00:00", "Z1", "Z2"),
        ("V3", "2019-08-01", "07:00:00", "Z3", "Z4"),
    ]);
    let g = common::graph(&[("V9", "2019-08-01", "07:00:00", "Z3", "Z4")]);
    let top = top_od_report(&o, &g, 5).unwrap();
    assert_eq!(top.len(), 2);
    assert_eq!((top[0].origin.as_str(), top[0].rank), ("Z1", 1));
    assert!((top[0].original_share - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(top[0].generated_share, 0.0);
    assert_eq!(top[1].generated_share, 1.0);
}

#[test]
fn bootstrap_quantile_grows_as_samples_shrink() {
    let big: Vec<f64> = vec![400.0, 300.0, 200.0, 100.0];
    let small: Vec<f64> = big.iter().map(|x| x / 20.0).collect();
    let q = |h: &[f64]| bootstrap_kl_quantile(h, 200, 0.99, 1e-6, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    assert!(q(&small) > q(&big));
    assert!(q(&big) > 0.0);
}
