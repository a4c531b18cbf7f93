use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use paritybound::concurrence::{witness, BoundReport, Verdict};
use paritybound::harness::{scatter, OracleOptions, ScatterConfig, DEFAULT_COUNT};
use paritybound::measurement::{parity_distribution, protocol_cost, sample_shots, ShotEstimate, SHOT_CSV_HEADER};
use paritybound::oracle::{roof_concurrence_with, RoofEstimate, RoofSettings, DEFAULT_MAX_SWEEPS, DEFAULT_RESTARTS};
use paritybound::stateio::read_state;
use paritybound::states::{default_time_grid, RandomEnsembleConfig};
use paritybound::{BipartiteDims, Error, Result};

/// Measurable concurrence bounds from parity measurements on two state copies.
#[derive(Parser)]
#[command(name = "paritybound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bound report for a state file. Exit code 0: entangled, 2: inconclusive.
    Bound { state: PathBuf },
    /// Simulate finite-shot parity measurements on a state file.
    Measure {
        state: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Convex-roof upper estimate next to the bound report.
    Oracle {
        state: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        /// Ensemble size (default: rank²).
        #[arg(long)]
        ensemble_size: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_MAX_SWEEPS)]
        max_sweeps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// CSV scatter of random mixed states in a mixedness band.
    Scatter(ScatterArgs),
    /// Number of observables for the parity protocol versus tomography.
    Cost {
        #[arg(long, value_parser = parse_dims)]
        dims: BipartiteDims,
    },
}

#[derive(Args)]
struct ScatterArgs {
    /// JSON ensemble config ({"dims","env_dim","time_grid","band","seed","count"});
    /// flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Subsystem dimensions, e.g. 2,5 (default 2,5).
    #[arg(long, value_parser = parse_dims)]
    dims: Option<BipartiteDims>,
    /// Mixedness band lo,hi on sqrt(1 - Tr rho^2) (default 0.2,0.21).
    #[arg(long, value_parser = parse_band)]
    band: Option<[f64; 2]>,
    /// Number of states (default 1000).
    #[arg(long)]
    count: Option<usize>,
    /// Master seed (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Environment dimension (default dim_a * dim_b).
    #[arg(long)]
    env_dim: Option<usize>,
    /// Add the squared convex-roof estimate to every row.
    #[arg(long)]
    with_oracle: bool,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    /// Oracle ensemble size (default: rank²).
    #[arg(long)]
    ensemble_size: Option<usize>,
    /// Output path (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_dims(s: &str) -> std::result::Result<BipartiteDims, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,b but got {s:?}"))?;
    let a = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{e}"))?;
    BipartiteDims::new(a, b).map_err(|e| e.to_string())
}

fn parse_band(s: &str) -> std::result::Result<[f64; 2], String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected lo,hi but got {s:?}"))?;
    Ok([
        lo.trim().parse().map_err(|e| format!("{e}"))?,
        hi.trim().parse().map_err(|e| format!("{e}"))?,
    ])
}

#[derive(Serialize)]
struct MeasureOutput {
    #[serde(flatten)]
    estimate: ShotEstimate,
    exact_v1: f64,
    exact_v2: f64,
}

#[derive(Serialize)]
struct OracleOutput {
    #[serde(flatten)]
    estimate: RoofEstimate,
    bound: BoundReport,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Bound { state } => {
            let rho = read_state(&state)?.density();
            let report = witness(&rho)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(match report.verdict {
                Verdict::Entangled => 0,
                Verdict::Inconclusive => 2,
            })
        }
        Command::Measure {
            state,
            shots,
            seed,
            format,
        } => {
            let rho = read_state(&state)?.density();
            let dist = parity_distribution(&rho)?;
            let estimate = sample_shots(&dist, shots, seed)?;
            match format {
                Format::Json => {
                    let out = MeasureOutput {
                        estimate,
                        exact_v1: dist.v1(),
                        exact_v2: dist.v2(),
                    };
                    println!("{}", serde_json::to_string_pretty(&out)?);
                }
                Format::Csv => {
                    println!("{SHOT_CSV_HEADER}");
                    println!("{}", estimate.to_csv_row());
                }
            }
            Ok(0)
        }
        Command::Oracle {
            state,
            restarts,
            ensemble_size,
            max_sweeps,
            seed,
        } => {
            let rho = read_state(&state)?.density();
            let bound = witness(&rho)?;
            let estimate = roof_concurrence_with(
                &rho,
                &RoofSettings {
                    ensemble_size,
                    restarts,
                    max_sweeps,
                    seed,
                },
            )?;
            println!("{}", serde_json::to_string_pretty(&OracleOutput { estimate, bound })?);
            Ok(0)
        }
        Command::Scatter(args) => run_scatter(args),
        Command::Cost { dims } => {
            println!("{}", serde_json::to_string_pretty(&protocol_cost(dims))?);
            Ok(0)
        }
    }
}

fn run_scatter(args: ScatterArgs) -> Result<u8> {
    let mut ensemble = match &args.config {
        Some(path) => load_config(path)?,
        None => RandomEnsembleConfig {
            dims: BipartiteDims::new(2, 5)?,
            env_dim: 10,
            time_grid: default_time_grid(),
            band: [0.2, 0.21],
            seed: 0,
            count: DEFAULT_COUNT,
        },
    };
    if let Some(dims) = args.dims {
        ensemble.dims = dims;
        if args.env_dim.is_none() && args.config.is_none() {
            ensemble.env_dim = dims.total();
        }
    }
    if let Some(band) = args.band {
        ensemble.band = band;
    }
    if let Some(count) = args.count {
        ensemble.count = count;
    }
    if let Some(seed) = args.seed {
        ensemble.seed = seed;
    }
    if let Some(env) = args.env_dim {
        ensemble.env_dim = env;
    }
    let cfg = ScatterConfig {
        ensemble,
        oracle: args.with_oracle.then_some(OracleOptions {
            restarts: args.restarts,
            ensemble_size: args.ensemble_size,
        }),
    };
    let csv = scatter(&cfg)?.to_csv();
    match args.out {
        Some(path) => fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn load_config(path: &Path) -> Result<RandomEnsembleConfig> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}
