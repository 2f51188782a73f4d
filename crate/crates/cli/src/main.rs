//! `jiomber`: run detector experiments, sweeps and operation-count tables.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jiomber::complexity::{self, Algorithm, ParamGrid};
use jiomber::harness::config::{parse_config, parse_detector_list, ExperimentConfig};
use jiomber::harness::monte_carlo::{run_monte_carlo, trial_seeds};
use jiomber::harness::output::{self, sidecar_path, write_metadata, Metadata};
use jiomber::harness::sweep::{sweep, SweepAxis};
use jiomber::Error;

const VERSION: &str = env!("JIOMBER_VERSION");

#[derive(Parser)]
#[command(name = "jiomber", version = VERSION, about = "Reduced-rank MBER multiuser detection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo BER-versus-symbol trace for every configured detector.
    Run(ExperimentArgs),
    /// Final BER against SNR, number of users, or rank.
    Sweep {
        #[arg(long)]
        axis: SweepAxis,
        #[command(flatten)]
        common: ExperimentArgs,
    },
    /// Per-symbol operation counts over a parameter grid.
    Complexity(ComplexityArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// Key-value configuration file; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Number of Monte Carlo trials (overrides the config).
    #[arg(long)]
    trials: Option<usize>,
    /// Output CSV; a `.meta.json` sidecar is written next to it. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated detectors (overrides the config).
    #[arg(long)]
    detectors: Option<String>,
}

#[derive(Args)]
struct ComplexityArgs {
    /// Comma-separated algorithms; all when omitted.
    #[arg(long)]
    algorithms: Option<String>,
    /// Observation length values, e.g. `33` or `31,33,35`.
    #[arg(long = "M", default_value = "33")]
    m: String,
    /// Rank values; `a..b` is an inclusive range.
    #[arg(long = "D", default_value = "1..20")]
    d: String,
    #[arg(long = "J", default_value = "1")]
    j: String,
    #[arg(long = "Lp", default_value = "3")]
    lp: String,
    #[arg(long = "Dmax", default_value = "20")]
    d_max: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn load_config(args: &ExperimentArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => parse_config(path).map_err(|e| Failure::Config(e.to_string()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.base_seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.num_trials = trials;
    }
    if let Some(list) = &args.detectors {
        cfg.detectors = parse_detector_list(list)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_values(flag: &str, text: &str) -> Result<Vec<u64>, Failure> {
    let bad = || Failure::Config(format!("--{flag}: cannot parse '{text}'"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((lo, hi)) => {
                let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
                let hi: u64 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Writes through `write` to `out`, or to stdout when no path is given.
fn emit(out: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
            let mut w = std::io::BufWriter::new(file);
            write(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock).map_err(|e| Failure::Runtime(format!("stdout: {e}")))
        }
    }
}

fn csv_io(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e.to_string())
}

fn run(args: ExperimentArgs) -> Result<(), Failure> {
    let cfg = load_config(&args)?;
    let result = run_monte_carlo(&cfg)?;
    let smoothing = cfg.smoothing_window;
    emit(args.out.as_deref(), |w| {
        output::write_trace_csv(&result, smoothing, w).map_err(csv_io)
    })?;

    let mut summary = serde_json::Map::new();
    for d in &result.detectors {
        let (ber, stderr) = d.final_ber(cfg.final_window);
        eprintln!("{:<16} final BER {ber:.4e} ± {stderr:.1e}", d.detector.name());
        summary.insert(
            d.detector.name().to_string(),
            serde_json::json!({ "final_ber": ber, "stderr": stderr, "rank_range": d.rank_range }),
        );
    }
    eprintln!("{} trials in {:.1} s", cfg.num_trials, result.wall_time_s);
    if let Some(path) = &args.out {
        let meta = Metadata {
            version: VERSION,
            command: "run",
            config: &cfg,
            base_seed: cfg.base_seed,
            num_trials: cfg.num_trials,
            trial_seeds: result.seeds.clone(),
            wall_time_s: result.wall_time_s,
            summary: Some(serde_json::Value::Object(summary)),
        };
        write_metadata(&meta, &sidecar_path(path))?;
    }
    Ok(())
}

fn run_sweep(axis: SweepAxis, args: ExperimentArgs) -> Result<(), Failure> {
    let cfg = load_config(&args)?;
    let result = sweep(&cfg, axis)?;
    emit(args.out.as_deref(), |w| output::write_sweep_csv(&result, w).map_err(csv_io))?;
    eprintln!("{} sweep: {} rows in {:.1} s", axis, result.rows.len(), result.wall_time_s);
    if let Some(path) = &args.out {
        let meta = Metadata {
            version: VERSION,
            command: &format!("sweep --axis {axis}"),
            config: &cfg,
            base_seed: cfg.base_seed,
            num_trials: cfg.num_trials,
            trial_seeds: trial_seeds(&cfg),
            wall_time_s: result.wall_time_s,
            summary: None,
        };
        write_metadata(&meta, &sidecar_path(path))?;
    }
    Ok(())
}

fn run_complexity(args: ComplexityArgs) -> Result<(), Failure> {
    let algorithms: Vec<Algorithm> = match &args.algorithms {
        Some(list) => list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()?,
        None => Algorithm::ALL.to_vec(),
    };
    let grid = ParamGrid {
        m: parse_values("M", &args.m)?,
        d: parse_values("D", &args.d)?,
        j: parse_values("J", &args.j)?,
        lp: parse_values("Lp", &args.lp)?,
        d_max: parse_values("Dmax", &args.d_max)?,
    };
    let reports = complexity::complexity_sweep(&algorithms, &grid)?;
    emit(args.out.as_deref(), |w| complexity::write_csv(&reports, w))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Sweep { axis, common } => run_sweep(axis, common),
        Command::Complexity(args) => run_complexity(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
