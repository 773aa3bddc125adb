mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tripkg::PipelineConfig;

#[derive(Parser, Debug)]
#[command(name = "tripkg", version, about = "Trip knowledge graph: ingest, label, generate and evaluate")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory holding every stage's inputs and outputs.
    #[arg(long, global = true)]
    workdir: Option<PathBuf>,

    /// Seed for generation and evaluation.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    config_dump: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a trip CSV into `records.csv` and `rejects.csv`.
    Ingest {
        /// Input CSV (overrides `paths.input`).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Build the trip graph from `records.csv`.
    Build,
    /// Mine per-vehicle labels and print the label summary.
    Mine,
    /// Generate a synthetic graph per label.
    Generate,
    /// Compare the generated graph with the original.
    Evaluate {
        /// Also write time-profile and rank-share CSVs for plotting.
        #[arg(long)]
        plot_data: bool,
    },
    /// Write a synthetic corpus with planted labels.
    SynthCorpus {
        /// Corpus specification (TOML); defaults apply to missing keys.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Corpus CSV path (default: `<workdir>/corpus.csv`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Ground-truth CSV path (default: `<workdir>/truth.csv`).
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Print a summary of mining, generation and evaluation outputs.
    Report,
    /// Run ingest, build, mine, generate and evaluate in order.
    Run {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        plot_data: bool,
    },
}

fn resolve(global: &Global) -> anyhow::Result<PipelineConfig> {
    let mut cfg = match &global.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
            PipelineConfig::from_toml(&text)?
        }
        None => PipelineConfig::default(),
    };
    if let Some(w) = &global.workdir {
        cfg.paths.workdir = w.clone();
    }
    if let Some(s) = global.seed {
        cfg.generation.seed = Some(s);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cli: Cli) -> anyhow::Result<commands::Status> {
    let mut cfg = resolve(&cli.global)?;
    if cli.global.config_dump {
        print!("{}", cfg.to_toml());
        return Ok(commands::Status::Ok);
    }
    let Some(command) = cli.command else {
        anyhow::bail!("no subcommand given; see `tripkg --help`");
    };
    match command {
        Command::Ingest { input } => {
            if input.is_some() {
                cfg.paths.input = input;
            }
            commands::ingest(&cfg)
        }
        Command::Build => commands::build(&cfg),
        Command::Mine => commands::mine(&cfg),
        Command::Generate => commands::generate(&cfg),
        Command::Evaluate { plot_data } => commands::evaluate(&cfg, plot_data),
        Command::SynthCorpus { spec, out, truth } => commands::synth_corpus(&cfg, spec, out, truth),
        Command::Report => commands::report(&cfg),
        Command::Run { input, plot_data } => {
            if input.is_some() {
                cfg.paths.input = input;
            }
            commands::run(&cfg, plot_data)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
