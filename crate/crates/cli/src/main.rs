//! `nfp`: simulate near-field ptychographic measurements and benchmark the
//! two recovery pipelines, writing aggregated CSV tables.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use nfp_cli::io;
use nfp_cli::{run_sweep, Experiment, ExperimentConfig};
use nfp_core::measure::SnrTarget;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "nfp",
    about = "Near-field ptychography: measurement simulation and phase retrieval benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Trials per parameter-grid cell.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Master seed; all per-trial randomness derives from it.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Write runtime columns as zero so reruns are byte-identical.
    #[arg(long, default_value_t = false)]
    stable: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Block recovery error and runtime over SNR for several mask supports.
    Alg1Sweep {
        /// Signal length; each 2*delta - 1 must divide it.
        #[arg(long, default_value_t = 105)]
        d: usize,
        /// Mask support sizes delta (repeatable).
        #[arg(long = "delta", default_values_t = vec![3usize, 8, 11])]
        deltas: Vec<usize>,
        /// SNR levels in dB, or `inf` for noiseless (repeatable).
        #[arg(long = "snr", default_values_t = default_snrs())]
        snrs: Vec<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Block recovery vs Wirtinger Flow on identical full-grid data.
    Compare {
        #[arg(long, default_value_t = 102)]
        d: usize,
        /// Mask support size delta.
        #[arg(long, default_value_t = 26)]
        delta: usize,
        #[arg(long = "snr", default_values_t = vec!["50".to_string(), "60".to_string()])]
        snrs: Vec<String>,
        /// Wirtinger Flow iteration counts (repeatable).
        #[arg(long = "iters", default_values_t = vec![100usize, 500, 2000])]
        iters: Vec<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Wirtinger Flow with a globally supported Gaussian mask, swept over
    /// the number of probe shifts.
    WfGlobal {
        /// Signal length (must be divisible by 6 for the low-pass PSF).
        #[arg(long, default_value_t = 102)]
        d: usize,
        /// Probe shift counts K (repeatable).
        #[arg(long = "K", default_values_t = vec![2usize, 4, 6, 8])]
        shifts: Vec<usize>,
        #[arg(long = "snr", default_values_t = vec!["80".to_string()])]
        snrs: Vec<String>,
        /// Wirtinger Flow iteration count.
        #[arg(long = "iters", default_value_t = 2000)]
        iters: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Conditioning of the reference lifted operator for each support size.
    Conditioning {
        /// Mask support sizes delta (repeatable).
        #[arg(long = "delta", default_values_t = (2usize..=13).collect::<Vec<_>>())]
        deltas: Vec<usize>,
        /// Fixed signal length; defaults to 3*(2*delta - 1) per support.
        #[arg(long)]
        d: Option<usize>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn default_snrs() -> Vec<String> {
    (1..=8).map(|k| (10 * k).to_string()).collect()
}

fn parse_snr(raw: &str) -> Result<SnrTarget> {
    if raw.eq_ignore_ascii_case("inf") {
        return Ok(SnrTarget::Clean);
    }
    let db: f64 = raw
        .parse()
        .with_context(|| format!("invalid SNR value: {raw}"))?;
    if !db.is_finite() {
        bail!("SNR must be finite or the literal `inf`");
    }
    Ok(SnrTarget::Db(db))
}

fn parse_snrs(raw: &[String]) -> Result<Vec<SnrTarget>> {
    raw.iter().map(|s| parse_snr(s)).collect()
}

fn write_rows(common: &CommonArgs, experiment: Experiment) -> Result<()> {
    let cfg = ExperimentConfig {
        experiment,
        trials: common.trials,
        seed: common.seed,
    };
    let rows = run_sweep(&cfg)?;
    let file = File::create(&common.out)
        .with_context(|| format!("cannot write {}", common.out.display()))?;
    io::write_sweep_csv(BufWriter::new(file), &rows, common.stable)?;
    eprintln!("wrote {} rows to {}", rows.len(), common.out.display());
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Alg1Sweep {
            d,
            deltas,
            snrs,
            common,
        } => write_rows(
            &common,
            Experiment::Alg1DeltaSweep {
                d,
                deltas,
                snrs: parse_snrs(&snrs)?,
            },
        ),
        Command::Compare {
            d,
            delta,
            snrs,
            iters,
            common,
        } => write_rows(
            &common,
            Experiment::Alg1VsAlg2 {
                d,
                delta,
                snrs: parse_snrs(&snrs)?,
                iteration_counts: iters,
            },
        ),
        Command::WfGlobal {
            d,
            shifts,
            snrs,
            iters,
            common,
        } => write_rows(
            &common,
            Experiment::WfGlobalMask {
                d,
                shifts,
                snrs: parse_snrs(&snrs)?,
                iterations: iters,
            },
        ),
        Command::Conditioning { deltas, d, out } => {
            let reports = nfp_cli::conditioning_reports(&deltas, d)?;
            let file =
                File::create(&out).with_context(|| format!("cannot write {}", out.display()))?;
            io::write_conditioning_csv(BufWriter::new(file), &reports)?;
            eprintln!("wrote {} rows to {}", reports.len(), out.display());
            Ok(())
        }
    }
}
