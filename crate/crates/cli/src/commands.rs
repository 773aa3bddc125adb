use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tripkg::chargraph::{build_association, build_pattern_distribution};
use tripkg::evaluate::{self, time_profile};
use tripkg::generator::{self, generate_all};
use tripkg::ingest::{parse_records, write_records, write_rejects};
use tripkg::kg::build_graph;
use tripkg::mining::{self, label_summary, write_profiles, MobilityLabel};
use tripkg::synth::{read_truth, write_truth, SynthSpec};
use tripkg::{EntityType, PipelineConfig, TripKG};

use crate::files::{load_graph, open, save_graph, write_atomic, Layout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok = 0,
    Partial = 1,
}

fn layout(cfg: &PipelineConfig) -> Layout {
    Layout::new(&cfg.paths.workdir)
}

pub fn ingest(cfg: &PipelineConfig) -> Result<Status> {
    let Some(input) = &cfg.paths.input else {
        bail!("no input CSV; pass --input or set paths.input");
    };
    let whitelist: Option<BTreeSet<String>> = cfg.paths.zone_whitelist.as_ref().map(|z| z.iter().cloned().collect());
    let f = std::fs::File::open(input).with_context(|| format!("cannot open {}", input.display()))?;
    let out = parse_records(std::io::BufReader::new(f), whitelist.as_ref())?;
    let l = layout(cfg);
    write_atomic(&l.records(), |w| Ok(write_records(w, &out.records)?))?;
    write_atomic(&l.rejects(), |w| Ok(write_rejects(w, &out.rejected)?))?;
    println!("ingest: {} rows, {} accepted, {} rejected", out.rows_seen(), out.records.len(), out.rejected.len());
    Ok(if out.rejected.is_empty() { Status::Ok } else { Status::Partial })
}

pub fn build(cfg: &PipelineConfig) -> Result<Status> {
    let l = layout(cfg);
    let out = parse_records(open(&l.records(), "ingest")?, None)?;
    if !out.rejected.is_empty() {
        bail!("{} is not a canonical record file ({} bad rows)", l.records().display(), out.rejected.len());
    }
    let g = build_graph(&out.records, &cfg.calendar, &cfg.timespans);
    save_graph(&l.graph(), &g)?;
    println!(
        "build: {} vehicles, {} trips, {} triples",
        g.entity_count(EntityType::Vehicle),
        g.entity_count(EntityType::Trip),
        g.total_triples()
    );
    Ok(Status::Ok)
}

pub fn mine(cfg: &PipelineConfig) -> Result<Status> {
    let l = layout(cfg);
    let mut g = load_graph(&l.graph(), "build")?;
    let profiles = mining::mine_all(&g, &cfg.mining)?;
    write_atomic(&l.profiles(), |w| Ok(write_profiles(w, profiles.values())?))?;
    let labels: BTreeMap<String, MobilityLabel> = profiles.iter().map(|(v, p)| (v.clone(), p.label)).collect();
    write_atomic(&l.labels(), |w| Ok(write_truth(w, &labels)?))?;

    g.attach_labels(&mining::label_map(&profiles))?;
    for label in g.label_names() {
        let sub = g.label_subgraph(&label)?;
        let f = build_pattern_distribution(&sub)?;
        write_atomic(&l.characteristics().join(format!("{label}_patterns.csv")), |w| Ok(f.write_csv(w)?))?;
        let vehicles: Vec<String> = sub.keys_of(EntityType::Vehicle).map(str::to_string).collect();
        let a = build_association(&sub, &vehicles, cfg.association.depth, cfg.association.match_mode)?;
        write_atomic(&l.characteristics().join(format!("{label}_association.csv")), |w| Ok(a.write_csv(w)?))?;
    }

    println!("{:<24} {:>8} {:>9} {:>8} {:>9}", "label", "vehicles", "veh. %", "trips", "trips %");
    for s in label_summary(&profiles) {
        println!("{:<24} {:>8} {:>8.2}% {:>8} {:>8.2}%", s.label.as_str(), s.vehicles, s.vehicle_share, s.trips, s.trip_share);
    }
    Ok(Status::Ok)
}

fn labelled_graph(l: &Layout) -> Result<TripKG> {
    let mut g = load_graph(&l.graph(), "build")?;
    let labels = read_truth(open(&l.labels(), "mine")?)?;
    let labels: BTreeMap<String, String> = labels.into_iter().map(|(v, m)| (v, m.as_str().to_string())).collect();
    g.attach_labels(&labels)?;
    Ok(g)
}

pub fn generate(cfg: &PipelineConfig) -> Result<Status> {
    let Some(seed) = cfg.generation.seed else {
        bail!("generation needs a seed; pass --seed or set generation.seed");
    };
    let l = layout(cfg);
    let g = labelled_graph(&l)?;
    let out = generate_all(&g, cfg, seed)?;
    let dir = l.generated();
    save_graph(&dir, &out.graph)?;
    write_atomic(&dir.join("trips.csv"), |w| Ok(generator::write_trips_csv(w, &out.trips, &cfg.timespans)?))?;
    write_atomic(&dir.join("report.jsonl"), |w| Ok(generator::write_reports_jsonl(w, &out.reports)?))?;
    if cfg.generation.keep_mapping {
        write_atomic(&dir.join("mapping.csv"), |w| Ok(generator::write_mapping_csv(w, &out.mapping)?))?;
    }
    let fallbacks = out.fallbacks();
    let leftover: usize = out.reports.iter().map(|r| r.leftover).sum();
    println!(
        "generate: {} vehicles, {} trips, {} fallback units, {} leftover units",
        out.mapping.len(),
        out.trips.len(),
        fallbacks,
        leftover
    );
    Ok(if fallbacks == 0 { Status::Ok } else { Status::Partial })
}

pub fn evaluate(cfg: &PipelineConfig, plot_data: bool) -> Result<Status> {
    let l = layout(cfg);
    let original = labelled_graph(&l)?;
    let generated = load_graph(&l.generated(), "generate")?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.generation.seed.unwrap_or(0));
    let report = evaluate::evaluate(&original, &generated, cfg, &mut rng)?;
    let dir = l.evaluation();
    write_atomic(&dir.join("report.json"), |w| {
        serde_json::to_writer_pretty(&mut *w, &report.labels)?;
        Ok(writeln!(w)?)
    })?;
    write_atomic(&dir.join("top_od.csv"), |w| Ok(evaluate::write_top_od(w, &report)?))?;
    if plot_data {
        let mut profiles = BTreeMap::new();
        for label in original.label_names() {
            profiles.insert(format!("{label}/original"), time_profile(&original.label_subgraph(&label)?));
            profiles.insert(format!("{label}/generated"), time_profile(&generated.label_subgraph(&label)?));
        }
        write_atomic(&dir.join("time_profile.csv"), |w| Ok(evaluate::write_time_profiles(w, &profiles)?))?;
        write_atomic(&dir.join("rank_share.csv"), |w| Ok(evaluate::write_rank_share(w, &report)?))?;
    }
    print_evaluation(&report.labels);
    Ok(Status::Ok)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"))
}

fn print_evaluation(labels: &[evaluate::LabelEvaluation]) {
    println!("{:<24} {:>10} {:>10} {:>10} {:>10} {:>10}", "label", "kl_time", "kl_od", "assoc", "cont_hist", "cont_gen");
    for e in labels {
        println!(
            "{:<24} {:>10.2e} {:>10.4} {:>10} {:>10} {:>10}",
            e.label,
            e.kl_temporal,
            e.kl_spatial,
            fmt_opt(e.association_bias),
            fmt_opt(e.continuity_historical),
            fmt_opt(e.continuity_generated)
        );
    }
}

pub fn synth_corpus(
    cfg: &PipelineConfig,
    spec: Option<PathBuf>,
    out: Option<PathBuf>,
    truth: Option<PathBuf>,
) -> Result<Status> {
    let spec = match spec {
        Some(p) => {
            let text = std::fs::read_to_string(&p).with_context(|| format!("cannot read {}", p.display()))?;
            toml::from_str::<SynthSpec>(&text).with_context(|| format!("bad corpus spec {}", p.display()))?
        }
        None => SynthSpec::default(),
    };
    let corpus = spec.generate()?;
    let l = layout(cfg);
    let out = out.unwrap_or_else(|| l.path("corpus.csv"));
    let truth = truth.unwrap_or_else(|| l.path("truth.csv"));
    write_atomic(&out, |w| Ok(write_records(w, &corpus.records)?))?;
    write_atomic(&truth, |w| Ok(write_truth(w, &corpus.truth)?))?;
    println!("synth-corpus: {} vehicles, {} trips -> {}", corpus.truth.len(), corpus.records.len(), out.display());
    Ok(Status::Ok)
}

pub fn report(cfg: &PipelineConfig) -> Result<Status> {
    let l = layout(cfg);
    let labels = read_truth(open(&l.labels(), "mine")?)?;
    let mut counts: BTreeMap<MobilityLabel, usize> = BTreeMap::new();
    for m in labels.values() {
        *counts.entry(*m).or_default() += 1;
    }
    println!("labels:");
    for (m, n) in &counts {
        println!("  {:<24} {n}", m.as_str());
    }

    let reports = std::io::read_to_string(open(&l.generated().join("report.jsonl"), "generate")?)?;
    let (mut dates, mut sampled, mut fallback, mut leftover, mut exits) = (0, 0u64, 0u64, 0u64, 0u64);
    for line in reports.lines().filter(|s| !s.is_empty()) {
        let r: serde_json::Value = serde_json::from_str(line)?;
        let get = |k: &str| r[k].as_u64().unwrap_or(0);
        dates += 1;
        sampled += get("sampled");
        fallback += get("fallback");
        leftover += get("leftover");
        exits += get("early_exits");
    }
    println!("generation: {dates} label-dates, {sampled} sampled, {fallback} fallback, {leftover} leftover, {exits} early exits");

    let eval: serde_json::Value =
        serde_json::from_reader(open(&l.evaluation().join("report.json"), "evaluate")?)?;
    println!("evaluation:");
    let num = |v: &serde_json::Value| v.as_f64().map_or_else(|| "n/a".to_string(), |x| format!("{x:.4}"));
    for e in eval.as_array().into_iter().flatten() {
        println!(
            "  {:<24} kl_time {} kl_od {} assoc {} continuity {} -> {}",
            e["label"].as_str().unwrap_or("?"),
            num(&e["kl_temporal"]),
            num(&e["kl_spatial"]),
            num(&e["association_bias"]),
            num(&e["continuity_historical"]),
            num(&e["continuity_generated"])
        );
    }
    Ok(Status::Ok)
}

pub fn run(cfg: &PipelineConfig, plot_data: bool) -> Result<Status> {
    let mut cfg = cfg.clone();
    let mut status = Status::Ok;
    if cfg.paths.input.is_none() {
        synth_corpus(&cfg, None, None, None)?;
        cfg.paths.input = Some(layout(&cfg).path("corpus.csv"));
    }
    status = status.max(ingest(&cfg)?);
    status = status.max(build(&cfg)?);
    status = status.max(mine(&cfg)?);
    status = status.max(generate(&cfg)?);
    status = status.max(evaluate(&cfg, plot_data)?);
    Ok(status)
}
