use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};

const SMALL: &str = "days = 7\ncommuters = 10\npassing = 20\nhigh_frequency = 4\nrandom = 6\nstable = 3\n";

fn tripkg(workdir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tripkg"))
        .arg("--workdir")
        .arg(workdir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn hash(path: &Path) -> String {
    let bytes = fs::read(path).unwrap();
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Small corpus written into `dir`, returning the corpus path.
fn small_corpus(dir: &Path) -> String {
    let spec = dir.join("spec.toml");
    fs::write(&spec, SMALL).unwrap();
    let o = tripkg(dir, &["synth-corpus", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    dir.join("corpus.csv").to_str().unwrap().to_string()
}

#[test]
fn stages_run_in_order_and_write_their_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path();
    let corpus = small_corpus(w);

    let o = tripkg(w, &["ingest", "--input", &corpus]);
    assert_eq!(code(&o), 0, "synthetic corpus ingests without rejects");
    assert_eq!(fs::read_to_string(w.join("rejects.csv")).unwrap(), "row,reason\n");
    assert_eq!(code(&tripkg(w, &["build"])), 0);
    let o = tripkg(w, &["mine"]);
    assert_eq!(code(&o), 0);

    // label, vehicles, vehicle share, trips, trip share
    let (mut v, mut t) = (0.0, 0.0);
    for line in stdout(&o).lines().skip(1) {
        let f: Vec<&str> = line.split_whitespace().collect();
        v += f[2].trim_end_matches('%').parse::<f64>().unwrap();
        t += f[4].trim_end_matches('%').parse::<f64>().unwrap();
    }
    assert!((v - 100.0).abs() <= 0.1 && (t - 100.0).abs() <= 0.1, "{v} {t}");

    let o = tripkg(w, &["generate", "--seed", "3"]);
    assert!(matches!(code(&o), 0 | 1), "{}", String::from_utf8_lossy(&o.stderr));
    let o = tripkg(w, &["evaluate", "--seed", "3", "--plot-data"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "records.csv",
        "graph/triples.tsv",
        "graph/properties.tsv",
        "profiles.csv",
        "labels.csv",
        "generated/triples.tsv",
        "generated/trips.csv",
        "generated/report.jsonl",
        "evaluation/report.json",
        "evaluation/top_od.csv",
        "evaluation/time_profile.csv",
        "evaluation/rank_share.csv",
    ] {
        assert!(w.join(f).is_file(), "{f} missing");
    }
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(w.join("evaluation/report.json")).unwrap()).unwrap();
    assert!(!report.as_array().unwrap().is_empty());
    assert_eq!(code(&tripkg(w, &["report"])), 0);
}

#[test]
fn same_seed_gives_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path();
    let corpus = small_corpus(w);
    assert!(code(&tripkg(w, &["run", "--input", &corpus, "--seed", "11"])) <= 1);
    let files = ["graph/triples.tsv", "generated/triples.tsv", "generated/trips.csv", "generated/report.jsonl"];
    let first: Vec<String> = files.iter().map(|f| hash(&w.join(f))).collect();
    assert!(code(&tripkg(w, &["build"])) == 0);
    assert!(code(&tripkg(w, &["generate", "--seed", "11"])) <= 1);
    let second: Vec<String> = files.iter().map(|f| hash(&w.join(f))).collect();
    assert_eq!(first, second);
    assert!(code(&tripkg(w, &["generate", "--seed", "12"])) <= 1);
    assert_ne!(hash(&w.join("generated/triples.tsv")), first[1]);
}

#[test]
fn rejected_rows_are_a_partial_success() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path();
    let input = w.join("in.csv");
    fs::write(&input, "vehicle,date,ftime,fzone,tzone\nV1,2019-08-01,09:30:00,Z3,Z7\nV1,2019-08-01,25:00:00,Z3,Z7\n").unwrap();
    let o = tripkg(w, &["ingest", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert_eq!(fs::read_to_string(w.join("rejects.csv")).unwrap(), "row,reason\n2,bad-time\n");
}

#[test]
fn fatal_errors_exit_with_two_and_say_what_to_do() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path();
    let o = tripkg(w, &["build"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("tripkg ingest"));

    let input = w.join("in.csv");
    fs::write(&input, "vehicle,date,ftime,fzone,tzone\nV1,2019-08-01,09:30:00,Z3,Z7\n").unwrap();
    assert_eq!(code(&tripkg(w, &["ingest", "--input", input.to_str().unwrap()])), 0);
    assert_eq!(code(&tripkg(w, &["build"])), 0);
    assert_eq!(code(&tripkg(w, &["mine"])), 0);
    let o = tripkg(w, &["generate"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));

    fs::write(w.join("bad.csv"), "vehicle,date\n").unwrap();
    assert_eq!(code(&tripkg(w, &["ingest", "--input", w.join("bad.csv").to_str().unwrap()])), 2);
}

#[test]
fn config_dump_round_trips_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path();
    let o = tripkg(w, &["--config-dump", "--seed", "5"]);
    assert_eq!(code(&o), 0);
    let dump = stdout(&o);
    assert!(dump.contains("seed = 5"));
    let cfg = w.join("cfg.toml");
    fs::write(&cfg, &dump).unwrap();
    let again = tripkg(w, &["--config", cfg.to_str().unwrap(), "--config-dump"]);
    assert_eq!(stdout(&again), dump);
    let over = tripkg(w, &["--config", cfg.to_str().unwrap(), "--seed", "9", "--config-dump"]);
    assert!(stdout(&over).contains("seed = 9"));

    fs::write(&cfg, "[mining]\nrho = 7.0\n").unwrap();
    assert_eq!(code(&tripkg(w, &["--config", cfg.to_str().unwrap(), "--config-dump"])), 2);
}

#[test]
fn bundled_corpus_pipeline_fits_the_desk_budget() {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let o = tripkg(dir.path(), &["run", "--seed", "7"]);
    let took = start.elapsed();
    assert!(code(&o) <= 1, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(took < Duration::from_secs(60), "pipeline took {took:?}");
}
