//! Browser bindings. Each operation takes plain text from the page and
//! returns a JSON string; the `*_json` functions hold the logic so they can
//! be tested natively.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use tripkg::config::AssociationFormula;
use tripkg::evaluate::evaluate;
use tripkg::generator::generate_all;
use tripkg::kg::build_graph;
use tripkg::mining::{self, association_score, concentration, label_summary};
use tripkg::synth::{recall, SynthSpec};
use tripkg::PipelineConfig;

/// Largest corpus the page will build, in vehicles.
pub const MAX_VEHICLES: usize = 3000;

fn spec_from(text: &str) -> Result<SynthSpec, String> {
    let spec: SynthSpec = toml::from_str(text).map_err(|e| format!("corpus spec: {e}"))?;
    if spec.vehicle_count() > MAX_VEHICLES {
        return Err(format!("corpus spec: at most {MAX_VEHICLES} vehicles in the browser"));
    }
    Ok(spec)
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct LabelRow {
    label: &'static str,
    vehicles: usize,
    vehicle_share: f64,
    trips: usize,
    trip_share: f64,
    planted: Option<usize>,
    recovered: Option<usize>,
}

#[derive(Serialize)]
struct MiningResult {
    vehicles: usize,
    trips: usize,
    labels: Vec<LabelRow>,
}

/// Builds the corpus described by `spec_toml`, mines labels and compares
/// them with the planted ones.
pub fn mine_corpus_json(spec_toml: &str) -> Result<String, String> {
    let spec = spec_from(spec_toml)?;
    let cfg = PipelineConfig::default();
    let corpus = spec.generate().map_err(|e| e.to_string())?;
    let g = build_graph(&corpus.records, &cfg.calendar, &cfg.timespans);
    let profiles = mining::mine_all(&g, &cfg.mining).map_err(|e| e.to_string())?;
    let hits = recall(&corpus.truth, &mining::label_map(&profiles));
    let labels = label_summary(&profiles)
        .into_iter()
        .map(|s| {
            let r = hits.get(&s.label);
            LabelRow {
                label: s.label.as_str(),
                vehicles: s.vehicles,
                vehicle_share: s.vehicle_share,
                trips: s.trips,
                trip_share: s.trip_share,
                planted: r.map(|r| r.0),
                recovered: r.map(|r| r.1),
            }
        })
        .collect();
    to_json(&MiningResult { vehicles: profiles.len(), trips: corpus.records.len(), labels })
}

#[derive(Serialize)]
struct ScoreResult {
    score: f64,
    literal_score: f64,
    row_concentration: u8,
    column_concentration: u8,
}

/// Parses a count matrix, one row per line, cells separated by commas or
/// whitespace.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<u64>>, String> {
    let rows: Vec<Vec<u64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|c| !c.is_empty())
                .map(|c| c.parse::<u64>().map_err(|_| format!("row {}: `{c}` is not a count", i + 1)))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    if rows.is_empty() {
        return Err("matrix is empty".into());
    }
    Ok(rows)
}

/// Association score of a count matrix under both row caps, with the
/// concentration level of its row and column totals.
pub fn score_matrix_json(matrix: &str, rho: f64) -> Result<String, String> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err("rho must lie in (0, 1]".into());
    }
    let m = parse_matrix(matrix)?;
    let width = m.iter().map(Vec::len).max().unwrap_or(0);
    let rows: Vec<u64> = m.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<u64> = (0..width).map(|j| m.iter().map(|r| r.get(j).copied().unwrap_or(0)).sum()).collect();
    let err = |e: tripkg::Error| e.to_string();
    to_json(&ScoreResult {
        score: association_score(&m, rho, AssociationFormula::Capped).map_err(err)?,
        literal_score: association_score(&m, rho, AssociationFormula::Literal).map_err(err)?,
        row_concentration: concentration(&rows).map_err(err)?.code(),
        column_concentration: concentration(&cols).map_err(err)?.code(),
    })
}

#[derive(Serialize)]
struct EvalRow {
    label: String,
    trips: usize,
    kl_temporal: f64,
    kl_spatial: f64,
    association_bias: Option<f64>,
    continuity_historical: Option<f64>,
    continuity_generated: Option<f64>,
}

#[derive(Serialize)]
struct GenerationResult {
    trips: usize,
    fallback: usize,
    labels: Vec<EvalRow>,
}

/// Mines the corpus, generates a synthetic copy with `seed` and `beam_width`
/// and evaluates it per label.
pub fn generate_json(spec_toml: &str, seed: u64, beam_width: usize) -> Result<String, String> {
    let spec = spec_from(spec_toml)?;
    let mut cfg = PipelineConfig::default();
    cfg.generation.beam_width = beam_width;
    cfg.validate().map_err(|e| e.to_string())?;
    let corpus = spec.generate().map_err(|e| e.to_string())?;
    let mut g = build_graph(&corpus.records, &cfg.calendar, &cfg.timespans);
    let profiles = mining::mine_all(&g, &cfg.mining).map_err(|e| e.to_string())?;
    g.attach_labels(&mining::label_map(&profiles)).map_err(|e| e.to_string())?;
    let out = generate_all(&g, &cfg, seed).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = evaluate(&g, &out.graph, &cfg, &mut rng).map_err(|e| e.to_string())?;
    let labels = report
        .labels
        .into_iter()
        .map(|l| EvalRow {
            label: l.label,
            trips: l.trips_generated,
            kl_temporal: l.kl_temporal,
            kl_spatial: l.kl_spatial,
            association_bias: l.association_bias,
            continuity_historical: l.continuity_historical,
            continuity_generated: l.continuity_generated,
        })
        .collect();
    to_json(&GenerationResult { trips: out.trips.len(), fallback: out.fallbacks(), labels })
}

/// Default corpus spec as TOML, to prefill the page.
pub fn default_spec_toml() -> String {
    let spec = SynthSpec { commuters: 40, passing: 110, high_frequency: 20, random: 20, stable: 10, ..SynthSpec::default() };
    toml::to_string(&spec).expect("spec serializes")
}

#[wasm_bindgen(js_name = defaultSpec)]
pub fn default_spec() -> String {
    default_spec_toml()
}

#[wasm_bindgen(js_name = mineCorpus)]
pub fn mine_corpus(spec_toml: &str) -> Result<String, JsValue> {
    mine_corpus_json(spec_toml).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = scoreMatrix)]
pub fn score_matrix(matrix: &str, rho: f64) -> Result<String, JsValue> {
    score_matrix_json(matrix, rho).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = generateAndEvaluate)]
pub fn generate_and_evaluate(spec_toml: &str, seed: u32, beam_width: u32) -> Result<String, JsValue> {
    generate_json(spec_toml, u64::from(seed), beam_width as usize).map_err(|e| JsValue::from_str(&e))
}
