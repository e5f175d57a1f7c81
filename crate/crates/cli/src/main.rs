//! Command-line front end: outage evaluation, placement optimization,
//! Monte Carlo validation and the reference experiment tables.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use edgecache::experiment::{run_experiment, ConfigFile, ExperimentSpec, Mode, OutputFormat};

#[derive(Parser, Debug)]
#[command(
    name = "edgecache",
    version,
    about = "Partition-based edge caching outage analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-degree outage for one K at each SNR (closed form, optional MC).
    Outage(RunArgs),
    /// Optimized proposed and full-cooperation system outage over an SNR grid.
    Sweep(RunArgs),
    /// Optimal placement per SNR.
    Optimize(RunArgs),
    /// End-to-end Monte Carlo of a fixed (or optimized) placement.
    Simulate(RunArgs),
    /// Closed form against Monte Carlo with z-scores; exit code 2 on a breach.
    Validate(RunArgs),
    /// Optimal placements for M in {1,3,5,7,9}, merged over SNR ranges.
    Table1(RunArgs),
    /// Proposed vs full-cooperation curves over 0-60 dB for M in {1,3,5,7,9}.
    Fig2(RunArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Flat JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated SNR grid in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr_db: Option<Vec<f64>>,
    /// Monte Carlo trials per cell (0 disables simulation).
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Search every ordering of the degree vector instead of nonincreasing ones.
    #[arg(long)]
    full_enumeration: bool,
    /// Number of edge nodes K.
    #[arg(long)]
    k: Option<usize>,
    /// Library size N.
    #[arg(long)]
    n: Option<usize>,
    /// Per-node cache size M (files).
    #[arg(long)]
    m: Option<usize>,
    /// Comma-separated cache sizes for table1 / fig2 / sweep.
    #[arg(long, value_delimiter = ',')]
    cache_sizes: Option<Vec<usize>>,
    /// Zipf exponent.
    #[arg(long)]
    rho: Option<f64>,
    /// Target rate in bit/s/Hz.
    #[arg(long)]
    rate: Option<f64>,
    /// Replication degree for `outage` / `validate` (default: all / {1, ceil(K/2), K}).
    #[arg(long)]
    t_d: Option<usize>,
    /// Fixed policy degrees for `simulate`, most popular file first.
    #[arg(long, value_delimiter = ',')]
    policy: Option<Vec<usize>>,
    /// Comma-separated K values for `validate`.
    #[arg(long, value_delimiter = ',')]
    validate_k: Option<Vec<usize>>,
}

impl Command {
    fn split(self) -> (Mode, RunArgs) {
        match self {
            Command::Outage(a) => (Mode::Outage, a),
            Command::Sweep(a) => (Mode::Sweep, a),
            Command::Optimize(a) => (Mode::Optimize, a),
            Command::Simulate(a) => (Mode::Simulate, a),
            Command::Validate(a) => (Mode::Validate, a),
            Command::Table1(a) => (Mode::Table1, a),
            Command::Fig2(a) => (Mode::Fig2, a),
        }
    }
}

fn build_spec(mode: Mode, args: RunArgs) -> anyhow::Result<ExperimentSpec> {
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let overrides = ConfigFile {
        k_ens: args.k,
        n_files: args.n,
        cache_size: args.m,
        cache_sizes: args.cache_sizes,
        rho: args.rho,
        rate_bps_hz: args.rate,
        snr_db: args.snr_db,
        t_d: args.t_d,
        policy: args.policy,
        validate_k: args.validate_k,
        mc_trials: args.trials,
        seed: args.seed,
        full_enumeration: args.full_enumeration.then_some(true),
    };
    let format = match args.format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    Ok(ExperimentSpec::resolve(
        mode,
        file.merge(overrides),
        args.out,
        format,
    )?)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let (mode, args) = cli.command.split();
    let spec = build_spec(mode, args).context("invalid configuration")?;
    let outcome = run_experiment(&spec).context("experiment failed")?;
    if spec.output_path.is_none() {
        print!("{}", outcome.rendered);
    }
    Ok(!outcome.validation_failed)
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
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("validation failed: at least one |z| exceeds the limit");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
