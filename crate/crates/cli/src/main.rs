//! `qent`: seeded parallel Monte Carlo surveys of two-qubit entanglement
//! against Renyi/Tsallis q-entropies, emitted as self-describing CSV.
//!
//! Subcommands
//! - `scatter`     one row per sampled state (C^2, EoF, entropy channels)
//! - `profile`     binned statistics over C^2 (mean, dispersion, derivative,
//!   indicator ratio r), one CSV per (family, q) channel
//! - `bell-curve`  the analytic R_inf(C^2) curve of the Bell-diagonal family
//! - `plot-script` a gnuplot script laying out previously written CSVs
//!
//! Runs are bit-for-bit reproducible for a fixed master seed, independent
//! of `--workers`. Exit codes: 0 success, 2 invalid configuration, 3 I/O
//! failure, 4 internal numerical failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qent_core::belldiag::{bell_r_infinity_curve, default_grid};
use qent_core::entropy::{EntropicOrder, EntropyFamily};
use qent_core::pipeline::{self, RunConfig};
use qent_core::report::{
    Quantity, channel_file_name, parse_grid_spec, read_csv_meta, write_bell_curve_csv,
    write_plot_script, write_profile_csv, write_scatter_csv,
};
use qent_core::sampler::EnsembleKind;
use qent_core::{Error, Result};

#[derive(Parser)]
#[command(name = "qent", version, about, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit one CSV row per sampled state.
    Scatter(RunArgs),
    /// Emit binned per-channel statistics over C^2.
    Profile(ProfileArgs),
    /// Emit the analytic Bell-diagonal R_inf(C^2) curve.
    BellCurve(BellCurveArgs),
    /// Emit a gnuplot script referencing previously written CSVs.
    PlotScript(PlotScriptArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Number of states to sample.
    #[arg(long, default_value_t = pipeline::DEFAULT_SAMPLES)]
    samples: usize,
    /// Master seed of the random streams (CLI flag wins over QENT_SEED).
    #[arg(long, env = "QENT_SEED", default_value_t = pipeline::DEFAULT_SEED)]
    seed: u64,
    /// Number of uniform C^2 bins.
    #[arg(long, default_value_t = pipeline::DEFAULT_BINS)]
    bins: usize,
    /// Worker threads; affects speed only, never results.
    #[arg(long)]
    workers: Option<usize>,
    /// Entropic order, repeatable; decimal, "1" (Shannon) or "inf".
    #[arg(long = "q", value_parser = parse_order)]
    q_list: Vec<EntropicOrder>,
    /// Entropy family: renyi | tsallis | tsallis-normalized.
    #[arg(long, default_value = "renyi", value_parser = parse_family)]
    family: EntropyFamily,
    /// State ensemble: full | bell-diagonal.
    #[arg(long, default_value = "full", value_parser = parse_ensemble)]
    ensemble: EnsembleKind,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Which per-bin statistic the run is about (recorded in metadata and
    /// used by plot-script); all columns are always written.
    #[arg(long, value_parser = parse_quantity)]
    quantity: Quantity,
}

#[derive(Args)]
struct BellCurveArgs {
    /// C^2 grid: comma-separated values or start:end:count (default
    /// 200 uniform points on (0, 1]).
    #[arg(long)]
    grid: Option<String>,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotScriptArgs {
    /// CSVs previously written by scatter, profile or bell-curve.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_order(s: &str) -> std::result::Result<EntropicOrder, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_family(s: &str) -> std::result::Result<EntropyFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_ensemble(s: &str) -> std::result::Result<EnsembleKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_quantity(s: &str) -> std::result::Result<Quantity, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl RunArgs {
    fn to_config(&self) -> Result<RunConfig> {
        let config = RunConfig {
            samples: self.samples,
            seed: self.seed,
            bins: self.bins,
            workers: self
                .workers
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
            q_list: if self.q_list.is_empty() {
                pipeline::default_q_list()
            } else {
                self.q_list.clone()
            },
            family: self.family,
            ensemble: self.ensemble,
        };
        config.validate()?;
        Ok(config)
    }
}

fn write_output(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|source| Error::Io {
                path: "<stdout>".to_string(),
                source,
            }),
    }
}

fn cmd_scatter(args: &RunArgs) -> Result<()> {
    let config = args.to_config()?;
    let records = pipeline::generate_records(&config)?;
    let mut buf = Vec::new();
    write_scatter_csv(&mut buf, &config, &records).map_err(|source| Error::Io {
        path: "<scatter csv>".to_string(),
        source,
    })?;
    write_output(&args.out, &buf)
}

fn cmd_profile(args: &ProfileArgs) -> Result<()> {
    let config = args.run.to_config()?;
    let acc = pipeline::accumulate_profiles(&config)?;
    let channels = config.channels();
    for (ch, channel) in channels.iter().enumerate() {
        let rows = acc.channel_profile(ch)?;
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &config, args.quantity, channel, &rows).map_err(|source| {
            Error::Io {
                path: "<profile csv>".to_string(),
                source,
            }
        })?;
        match &args.run.out {
            Some(base) => {
                let path = if channels.len() == 1 {
                    base.clone()
                } else {
                    channel_file_name(base, channel)
                };
                write_output(&Some(path.clone()), &buf)?;
                eprintln!("wrote {}", path.display());
            }
            None => write_output(&None, &buf)?,
        }
    }
    Ok(())
}

fn cmd_bell_curve(args: &BellCurveArgs) -> Result<()> {
    let grid = match &args.grid {
        Some(spec) => parse_grid_spec(spec)?,
        None => default_grid(200),
    };
    let points = bell_r_infinity_curve(&grid)?;
    let mut buf = Vec::new();
    write_bell_curve_csv(&mut buf, &points).map_err(|source| Error::Io {
        path: "<bell curve csv>".to_string(),
        source,
    })?;
    write_output(&args.out, &buf)
}

fn cmd_plot_script(args: &PlotScriptArgs) -> Result<()> {
    let mut inputs = Vec::with_capacity(args.inputs.len());
    for path in &args.inputs {
        let meta = read_csv_meta(path)?;
        inputs.push((path.display().to_string(), meta));
    }
    let mut buf = Vec::new();
    write_plot_script(&mut buf, &inputs)?;
    write_output(&args.out, &buf)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io { .. } => 3,
        Error::NotHermitian { .. } | Error::NoConvergence(_) | Error::NegativeEigenvalue { .. } => {
            4
        }
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Scatter(args) => cmd_scatter(args),
        Command::Profile(args) => cmd_profile(args),
        Command::BellCurve(args) => cmd_bell_curve(args),
        Command::PlotScript(args) => cmd_plot_script(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
