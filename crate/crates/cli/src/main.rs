// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod experiments;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperentropy::dynamics::presets;

use config::{Experiment, ExperimentConfig, FamilyRef};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Library(#[from] hyperentropy::Error),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use hyperentropy::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Library(E::SizeLimit { .. }) => 3,
            CliError::Library(E::Invariant(_)) | CliError::Invariant(_) => 4,
            CliError::Library(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "hyperentropy", version, about = "Hausdorff-metric entropy experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config (or from defaults).
    Run(RunArgs),
    /// List the built-in families.
    ListPresets,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config; omitted fields take their defaults.
    config: Option<PathBuf>,
    /// Use a built-in family instead of the configured one.
    #[arg(long)]
    preset: Option<String>,
    /// Override the configured experiment.
    #[arg(long, value_enum)]
    experiment: Option<Experiment>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Print the fully resolved config and exit.
    #[arg(long)]
    print_config: bool,
}

fn load(args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(p) = &args.preset {
        cfg.family = FamilyRef::Preset(p.clone());
    }
    if let Some(e) = args.experiment {
        cfg.experiment = e;
    }
    if let Some(o) = &args.out {
        cfg.output = o.clone();
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn run(args: &RunArgs) -> Result<(), CliError> {
    let cfg = load(args)?;
    if args.print_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return Ok(());
    }
    cfg.validate()?;
    fs::create_dir_all(&cfg.output)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", cfg.workers)))?;
    pool.install(|| experiments::run(&cfg, &cfg.output))?;
    println!("wrote results to {}", cfg.output.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::ListPresets => {
            for (name, description) in presets::PRESETS {
                println!("{name:<12} {description}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
