//! Fidelity of a generated graph against the historical one, per label.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rand::Rng;
use serde::Serialize;

use crate::chargraph::{continuity_chains, daily_association, l2_distance, stacked_summary};
use crate::config::{AssociationConfig, PipelineConfig, TimeSpanConfig};
use crate::error::{Error, Result};
use crate::kg::TripKG;

/// `KL(p || q)` after normalising both histograms, adding `smoothing` to
/// every bin and renormalising.
pub fn kl_divergence(p: &[f64], q: &[f64], smoothing: f64) -> Result<f64> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::Empty("KL divergence of an empty histogram"));
    }
    if p.len() != q.len() {
        return Err(Error::InvalidArgument(format!("histogram lengths differ: {} vs {}", p.len(), q.len())));
    }
    if !(smoothing > 0.0) {
        return Err(Error::InvalidArgument("smoothing must be positive".into()));
    }
    let smooth = |h: &[f64]| -> Result<Vec<f64>> {
        let total: f64 = h.iter().sum();
        if !(total > 0.0) || h.iter().any(|x| *x < 0.0) {
            return Err(Error::Empty("KL divergence of a histogram without mass"));
        }
        let z = 1.0 + smoothing * h.len() as f64;
        Ok(h.iter().map(|x| (x / total + smoothing) / z).collect())
    };
    let (p, q) = (smooth(p)?, smooth(q)?);
    Ok(p.iter().zip(&q).map(|(a, b)| a * (a / b).ln()).sum::<f64>().max(0.0))
}

/// Trip counts per configured span, in configuration order.
pub fn temporal_histogram(sub: &TripKG, spans: &TimeSpanConfig) -> Vec<f64> {
    let mut h = vec![0.0; spans.len()];
    for t in sub.trips() {
        if let Some(i) = spans.position(t.span) {
            h[i] += 1.0;
        }
    }
    h
}

pub fn od_counts(sub: &TripKG) -> BTreeMap<(String, String), u64> {
    let mut m = BTreeMap::new();
    for t in sub.trips() {
        *m.entry((t.origin.to_string(), t.dest.to_string())).or_default() += 1;
    }
    m
}

/// OD histograms of two graphs over the union of their supports.
pub fn spatial_histograms(a: &TripKG, b: &TripKG) -> (Vec<(String, String)>, Vec<f64>, Vec<f64>) {
    let (ca, cb) = (od_counts(a), od_counts(b));
    let keys: Vec<(String, String)> = ca.keys().chain(cb.keys()).cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let get = |c: &BTreeMap<(String, String), u64>| keys.iter().map(|k| c.get(k).copied().unwrap_or(0) as f64).collect();
    let (ha, hb) = (get(&ca), get(&cb));
    (keys, ha, hb)
}

/// Mean association vector over the stacked daily rows of a graph.
pub fn association_vector(sub: &TripKG, cfg: &AssociationConfig) -> Result<Vec<f64>> {
    let daily = daily_association(sub, cfg.depth, cfg.match_mode)?;
    stacked_summary(&daily, cfg.depth).mean().ok_or(Error::Empty("no vehicle has an association"))
}

pub fn association_bias(original: &TripKG, generated: &TripKG, cfg: &AssociationConfig) -> Result<f64> {
    Ok(l2_distance(&association_vector(original, cfg)?, &association_vector(generated, cfg)?))
}

/// Share of adjacent same-day trip pairs that thread; `None` without pairs.
pub fn continuity_rate(sub: &TripKG) -> Option<f64> {
    let (mut pairs, mut hits) = (0usize, 0usize);
    for c in continuity_chains(sub) {
        pairs += c.pair_count();
        hits += c.continuous_pairs();
    }
    (pairs > 0).then(|| hits as f64 / pairs as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopOdRow {
    pub rank: usize,
    pub origin: String,
    pub dest: String,
    pub original_share: f64,
    pub generated_share: f64,
}

/// The `k` heaviest OD pairs of the original, with both graphs' shares.
pub fn top_od_report(original: &TripKG, generated: &TripKG, k: usize) -> Result<Vec<TopOdRow>> {
    if k == 0 {
        return Err(Error::InvalidArgument("top-k needs k >= 1".into()));
    }
    let (keys, ho, hg) = spatial_histograms(original, generated);
    let (to, tg) = (ho.iter().sum::<f64>().max(1.0), hg.iter().sum::<f64>().max(1.0));
    let mut idx: Vec<usize> = (0..keys.len()).filter(|&i| ho[i] > 0.0).collect();
    idx.sort_by(|&a, &b| ho[b].total_cmp(&ho[a]).then(keys[a].cmp(&keys[b])));
    Ok(idx
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(r, i)| TopOdRow {
            rank: r + 1,
            origin: keys[i].0.clone(),
            dest: keys[i].1.clone(),
            original_share: ho[i] / to,
            generated_share: hg[i] / tg,
        })
        .collect())
}

/// `q`-quantile of `KL(resample || hist)` over `rounds` multinomial
/// resamples of `hist` at its own total.
pub fn bootstrap_kl_quantile<R: Rng + ?Sized>(
    hist: &[f64],
    rounds: usize,
    q: f64,
    smoothing: f64,
    rng: &mut R,
) -> Result<f64> {
    let table = crate::generator::AliasTable::new(hist)?;
    let n = hist.iter().sum::<f64>().round() as usize;
    let mut kls = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let mut h = vec![0.0; hist.len()];
        for _ in 0..n {
            h[table.sample(rng)] += 1.0;
        }
        kls.push(kl_divergence(&h, hist, smoothing)?);
    }
    kls.sort_by(f64::total_cmp);
    let pos = ((kls.len() as f64 - 1.0) * q).round() as usize;
    kls.get(pos).copied().ok_or(Error::Empty("bootstrap needs at least one round"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelEvaluation {
    pub label: String,
    pub vehicles_original: usize,
    pub vehicles_generated: usize,
    pub trips_original: usize,
    pub trips_generated: usize,
    pub kl_temporal: f64,
    pub kl_spatial: f64,
    /// 99th percentile of the historical OD histogram's KL against its own
    /// bootstrap resamples.
    pub kl_spatial_bootstrap_p99: f64,
    pub association_original: Option<Vec<f64>>,
    pub association_generated: Option<Vec<f64>>,
    pub association_bias: Option<f64>,
    pub continuity_historical: Option<f64>,
    pub continuity_generated: Option<f64>,
    pub top_od: Vec<TopOdRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub labels: Vec<LabelEvaluation>,
}

pub const BOOTSTRAP_ROUNDS: usize = 200;

pub fn evaluate_label<R: Rng + ?Sized>(
    original: &TripKG,
    generated: &TripKG,
    label: &str,
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<LabelEvaluation> {
    use crate::kg::EntityType::{Trip, Vehicle};
    let o = original.label_subgraph(label)?;
    let g = generated.label_subgraph(label)?;
    let eps = cfg.evaluation.smoothing;
    let kl_temporal =
        kl_divergence(&temporal_histogram(&g, &cfg.timespans), &temporal_histogram(&o, &cfg.timespans), eps)?;
    let (_, ho, hg) = spatial_histograms(&o, &g);
    let kl_spatial = kl_divergence(&hg, &ho, eps)?;
    let kl_spatial_bootstrap_p99 = bootstrap_kl_quantile(&ho, BOOTSTRAP_ROUNDS, 0.99, eps, rng)?;
    let association_original = association_vector(&o, &cfg.association).ok();
    let association_generated = association_vector(&g, &cfg.association).ok();
    let association_bias = match (&association_original, &association_generated) {
        (Some(a), Some(b)) => Some(l2_distance(a, b)),
        _ => None,
    };
    Ok(LabelEvaluation {
        label: label.to_string(),
        vehicles_original: o.entity_count(Vehicle),
        vehicles_generated: g.entity_count(Vehicle),
        trips_original: o.entity_count(Trip),
        trips_generated: g.entity_count(Trip),
        kl_temporal,
        kl_spatial,
        kl_spatial_bootstrap_p99,
        association_original,
        association_generated,
        association_bias,
        continuity_historical: continuity_rate(&o),
        continuity_generated: continuity_rate(&g),
        top_od: top_od_report(&o, &g, cfg.evaluation.top_k)?,
    })
}

/// Evaluates every label present in the original graph that has trips.
pub fn evaluate<R: Rng + ?Sized>(original: &TripKG, generated: &TripKG, cfg: &PipelineConfig, rng: &mut R) -> Result<EvalReport> {
    let mut labels = Vec::new();
    for label in original.label_names() {
        let sub = original.label_subgraph(&label)?;
        if sub.entity_count(crate::kg::EntityType::Trip) == 0 {
            continue;
        }
        labels.push(evaluate_label(original, generated, &label, cfg, rng)?);
    }
    Ok(EvalReport { labels })
}

pub const PROFILE_BIN_SECONDS: u32 = 15 * 60;

/// Share of trips per 15-minute bin of the day by start time.
pub fn time_profile(sub: &TripKG) -> Vec<f64> {
    let bins = (86_400 / PROFILE_BIN_SECONDS) as usize;
    let mut h = vec![0.0; bins];
    for t in sub.trips() {
        h[(t.ftime.seconds() / PROFILE_BIN_SECONDS) as usize] += 1.0;
    }
    let total: f64 = h.iter().sum();
    if total > 0.0 {
        h.iter_mut().for_each(|x| *x /= total);
    }
    h
}

pub fn bin_label(bin: usize) -> String {
    let m = bin as u32 * PROFILE_BIN_SECONDS / 60;
    format!("{:02}:{:02}", m / 60, m % 60)
}

/// `bin,label,share` rows for every label's 15-minute profile.
pub fn write_time_profiles<W: Write>(sink: W, profiles: &BTreeMap<String, Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["bin", "label", "share"])?;
    for (label, p) in profiles {
        for (i, s) in p.iter().enumerate() {
            w.write_record([bin_label(i), label.clone(), format!("{s:.6}")])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_top_od<W: Write>(sink: W, report: &EvalReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["label", "rank", "od", "original_share", "generated_share"])?;
    for l in &report.labels {
        for r in &l.top_od {
            w.write_record([
                l.label.clone(),
                r.rank.to_string(),
                format!("{}->{}", r.origin, r.dest),
                format!("{:.6}", r.original_share),
                format!("{:.6}", r.generated_share),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `label,rank,original_share,generated_share` for rank/share curves.
pub fn write_rank_share<W: Write>(sink: W, report: &EvalReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["label", "rank", "original_share", "generated_share"])?;
    for l in &report.labels {
        for r in &l.top_od {
            w.write_record([
                l.label.clone(),
                r.rank.to_string(),
                format!("{:.6}", r.original_share),
                format!("{:.6}", r.generated_share),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
