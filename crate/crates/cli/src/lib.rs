//! Experiment harness for the recovery pipelines: seeded random trials for
//! the block recovery algorithm and Wirtinger Flow, parameter sweeps with
//! trial-level parallelism, and CSV persistence.
//!
//! Determinism contract: every statistic a sweep emits is a pure function of
//! the experiment configuration and the seed. Each trial derives its own
//! random streams from `(seed, trial_index)`, so results do not depend on
//! thread scheduling; wall-clock columns are the only nondeterministic
//! output and can be zeroed for byte-reproducible files.

pub mod io;

use anyhow::{bail, Context, Result};
use nfp_core::angsync::{self, BandedAutocorrelation};
use nfp_core::lift::{self, LiftedOperator};
use nfp_core::masks;
use nfp_core::measure::{self, IndexSet, MeasurementGrid, NoiseSpec, SnrTarget};
use nfp_core::metrics;
use nfp_core::num_complex::Complex64;
use nfp_core::rng::Rng;
use nfp_core::signal::ComplexSignal;
use nfp_core::wflow::{self, WfConfig};
use rayon::prelude::*;
use std::time::Instant;

// Stream tags for deriving independent per-trial randomness.
const STREAM_SIGNAL: u64 = 1;
const STREAM_NOISE: u64 = 2;
const STREAM_MASK: u64 = 3;
const STREAM_WF: u64 = 4;

/// Outcome of one randomized recovery trial.
#[derive(Clone, Copy, Debug)]
pub struct TrialResult {
    /// `10 log10(min_phi ||x - e^{i phi} x_est||^2 / ||x||^2)`; negative
    /// infinity flags exact recovery, positive infinity a diverged descent
    /// (the iterate norm grew without bound, typical below the
    /// identifiability limit).
    pub error_db: f64,
    /// Wall time of the recovery (excluding data simulation).
    pub runtime_seconds: f64,
}

/// Mask regime for Wirtinger Flow trials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaskKind {
    /// Admissible chirp pair: locally supported mask, periodic PSF.
    Local,
    /// Low-pass PSF with a globally supported Gaussian mask.
    Global,
}

fn subseed(seed: u64, tag: u64) -> u64 {
    Rng::stream(seed, tag).next_u64()
}

fn gaussian_sample(d: usize, seed: u64) -> ComplexSignal {
    let mut rng = Rng::stream(seed, STREAM_SIGNAL);
    ComplexSignal::random_normal(d, 1.0, &mut rng)
}

fn apply_noise(grid: &MeasurementGrid, snr: SnrTarget, seed: u64) -> Result<MeasurementGrid> {
    Ok(measure::add_noise(
        grid,
        &NoiseSpec {
            target: snr,
            seed: subseed(seed, STREAM_NOISE),
        },
    )?)
}

fn grid_rhs(grid: &MeasurementGrid) -> Vec<Complex64> {
    grid.values()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect()
}

/// One full-grid trial of the block recovery pipeline: simulate, rearrange,
/// invert the lifted system, synchronize, and score.
pub fn run_alg1_trial(d: usize, delta: usize, snr: SnrTarget, seed: u64) -> Result<TrialResult> {
    let (p, m) = masks::admissible_pair(d, delta)?;
    let x = gaussian_sample(d, seed);
    let idx = IndexSet::full_grid(d, delta)?;
    let clean = measure::forward_nfp(&x, &p, &m, &idx)?;
    let noisy = apply_noise(&clean, snr, seed)?;

    let start = Instant::now();
    let family = masks::derive_masks(&p, &m, 2 * delta - 1)?;
    let operator = LiftedOperator::assemble(&family, d, delta)?;
    let tilde = lift::rearrange_near_to_far(&noisy)?;
    let z = operator.solve(&grid_rhs(&tilde))?;
    let auto = BandedAutocorrelation::from_vector(&z).symmetrized();
    let magnitudes = auto.magnitude_estimates();
    let phases = angsync::sync_weighted_laplacian(&auto)?;
    let estimate = angsync::assemble_estimate(&phases, &magnitudes)?;
    let runtime_seconds = start.elapsed().as_secs_f64();

    Ok(TrialResult {
        error_db: metrics::recovery_error_db(&x, &estimate)?,
        runtime_seconds,
    })
}

/// One Wirtinger Flow trial over a diagonal band of `k_shifts` probe shifts
/// with `l_offsets` detector offsets per shift.
pub fn run_wf_trial(
    d: usize,
    k_shifts: usize,
    l_offsets: usize,
    snr: SnrTarget,
    iterations: usize,
    mask_kind: MaskKind,
    seed: u64,
) -> Result<TrialResult> {
    let (p, m) = match mask_kind {
        MaskKind::Global => {
            if d % 3 != 0 || (d / 3 + 1) % 2 == 0 {
                bail!("global-mask trials need d divisible by 6 so the low-pass bandwidth d/3 + 1 is an odd integer");
            }
            let p = masks::lowpass_psf(d, d / 3 + 1)?;
            let m = masks::random_mask(d, subseed(seed, STREAM_MASK));
            (p, m)
        }
        MaskKind::Local => {
            if l_offsets % 2 == 0 {
                bail!("local-mask trials need an odd offset count L = 2*delta - 1");
            }
            let delta = (l_offsets + 1) / 2;
            masks::admissible_pair(d, delta)?
        }
    };
    let x = gaussian_sample(d, seed);
    let idx = IndexSet::diagonal_band(d, k_shifts, l_offsets)?;
    let clean = measure::forward_nfp(&x, &p, &m, &idx)?;
    let noisy = apply_noise(&clean, snr, seed)?;

    let start = Instant::now();
    let family = masks::derive_masks(&p, &m, l_offsets)?;
    let tilde = lift::rearrange_near_to_far(&noisy)?;
    let problem = wflow::vectorize_measurements(&tilde, &family)?;
    let cfg = WfConfig::new(iterations, subseed(seed, STREAM_WF));
    let error_db = match wflow::run(&problem, &cfg, None) {
        Ok((estimate, _)) => metrics::recovery_error_db(&x, &estimate)?,
        // A diverged descent has unbounded error; record it instead of
        // aborting the sweep.
        Err(nfp_core::Error::Divergence { .. }) => f64::INFINITY,
        Err(e) => return Err(e.into()),
    };
    let runtime_seconds = start.elapsed().as_secs_f64();

    Ok(TrialResult {
        error_db,
        runtime_seconds,
    })
}

/// One head-to-head trial: both algorithms invert the same noisy full-grid
/// measurements. Returns the block-recovery result and one Wirtinger Flow
/// result per requested iteration count.
pub fn run_compare_trial(
    d: usize,
    delta: usize,
    snr: SnrTarget,
    iteration_counts: &[usize],
    seed: u64,
) -> Result<(TrialResult, Vec<TrialResult>)> {
    let (p, m) = masks::admissible_pair(d, delta)?;
    let x = gaussian_sample(d, seed);
    let idx = IndexSet::full_grid(d, delta)?;
    let clean = measure::forward_nfp(&x, &p, &m, &idx)?;
    let noisy = apply_noise(&clean, snr, seed)?;
    let family = masks::derive_masks(&p, &m, 2 * delta - 1)?;

    let start = Instant::now();
    let operator = LiftedOperator::assemble(&family, d, delta)?;
    let tilde = lift::rearrange_near_to_far(&noisy)?;
    let z = operator.solve(&grid_rhs(&tilde))?;
    let auto = BandedAutocorrelation::from_vector(&z).symmetrized();
    let magnitudes = auto.magnitude_estimates();
    let phases = angsync::sync_weighted_laplacian(&auto)?;
    let estimate = angsync::assemble_estimate(&phases, &magnitudes)?;
    let alg1 = TrialResult {
        error_db: metrics::recovery_error_db(&x, &estimate)?,
        runtime_seconds: start.elapsed().as_secs_f64(),
    };

    let mut wf_results = Vec::with_capacity(iteration_counts.len());
    for &iterations in iteration_counts {
        let start = Instant::now();
        let tilde = lift::rearrange_near_to_far(&noisy)?;
        let problem = wflow::vectorize_measurements(&tilde, &family)?;
        let cfg = WfConfig::new(iterations, subseed(seed, STREAM_WF));
        let error_db = match wflow::run(&problem, &cfg, None) {
            Ok((wf_estimate, _)) => metrics::recovery_error_db(&x, &wf_estimate)?,
            Err(nfp_core::Error::Divergence { .. }) => f64::INFINITY,
            Err(e) => return Err(e.into()),
        };
        wf_results.push(TrialResult {
            error_db,
            runtime_seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok((alg1, wf_results))
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// The three reproduction experiments.
#[derive(Clone, Debug)]
pub enum Experiment {
    /// Block recovery error/runtime as a function of SNR and mask support.
    Alg1DeltaSweep {
        d: usize,
        deltas: Vec<usize>,
        snrs: Vec<SnrTarget>,
    },
    /// Block recovery vs Wirtinger Flow on identical full-grid data.
    Alg1VsAlg2 {
        d: usize,
        delta: usize,
        snrs: Vec<SnrTarget>,
        iteration_counts: Vec<usize>,
    },
    /// Wirtinger Flow with a globally supported Gaussian mask, swept over
    /// the number of probe shifts.
    WfGlobalMask {
        d: usize,
        shifts: Vec<usize>,
        snrs: Vec<SnrTarget>,
        iterations: usize,
    },
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub trials: usize,
    pub seed: u64,
}

/// One aggregated row of a sweep.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub experiment: &'static str,
    pub d: usize,
    pub delta_or_k: usize,
    pub snr: SnrTarget,
    pub iterations: usize,
    pub mean_error_db: f64,
    pub mean_runtime_s: f64,
    pub trials: usize,
    pub seed: u64,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in values {
        sum += v;
        count += 1;
    }
    sum / count.max(1) as f64
}

fn collect_trials<F>(trials: usize, run: F) -> Result<Vec<TrialResult>>
where
    F: Fn(u64) -> Result<TrialResult> + Sync,
{
    (0..trials as u64)
        .into_par_iter()
        .map(|t| run(t).with_context(|| format!("trial {t} failed")))
        .collect()
}

/// Run every cell of the configured experiment grid, `trials` seeded trials
/// per cell, in parallel across trials. Rows come back in deterministic
/// grid order with deterministic statistics.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    if cfg.trials == 0 {
        bail!("sweeps need at least one trial");
    }
    let mut rows = Vec::new();
    match &cfg.experiment {
        Experiment::Alg1DeltaSweep { d, deltas, snrs } => {
            for &delta in deltas {
                for &snr in snrs {
                    let results = collect_trials(cfg.trials, |t| {
                        run_alg1_trial(*d, delta, snr, Rng::stream(cfg.seed, t).next_u64())
                    })?;
                    rows.push(SweepRow {
                        experiment: "alg1",
                        d: *d,
                        delta_or_k: delta,
                        snr,
                        iterations: 0,
                        mean_error_db: mean(results.iter().map(|r| r.error_db)),
                        mean_runtime_s: mean(results.iter().map(|r| r.runtime_seconds)),
                        trials: cfg.trials,
                        seed: cfg.seed,
                    });
                }
            }
        }
        Experiment::Alg1VsAlg2 {
            d,
            delta,
            snrs,
            iteration_counts,
        } => {
            for &snr in snrs {
                let results: Vec<(TrialResult, Vec<TrialResult>)> = (0..cfg.trials as u64)
                    .into_par_iter()
                    .map(|t| {
                        run_compare_trial(
                            *d,
                            *delta,
                            snr,
                            iteration_counts,
                            Rng::stream(cfg.seed, t).next_u64(),
                        )
                        .with_context(|| format!("trial {t} failed"))
                    })
                    .collect::<Result<_>>()?;
                rows.push(SweepRow {
                    experiment: "alg1",
                    d: *d,
                    delta_or_k: *delta,
                    snr,
                    iterations: 0,
                    mean_error_db: mean(results.iter().map(|r| r.0.error_db)),
                    mean_runtime_s: mean(results.iter().map(|r| r.0.runtime_seconds)),
                    trials: cfg.trials,
                    seed: cfg.seed,
                });
                for (i, &iterations) in iteration_counts.iter().enumerate() {
                    rows.push(SweepRow {
                        experiment: "alg2",
                        d: *d,
                        delta_or_k: *delta,
                        snr,
                        iterations,
                        mean_error_db: mean(results.iter().map(|r| r.1[i].error_db)),
                        mean_runtime_s: mean(results.iter().map(|r| r.1[i].runtime_seconds)),
                        trials: cfg.trials,
                        seed: cfg.seed,
                    });
                }
            }
        }
        Experiment::WfGlobalMask {
            d,
            shifts,
            snrs,
            iterations,
        } => {
            for &k in shifts {
                for &snr in snrs {
                    let results = collect_trials(cfg.trials, |t| {
                        run_wf_trial(
                            *d,
                            k,
                            *d,
                            snr,
                            *iterations,
                            MaskKind::Global,
                            Rng::stream(cfg.seed, t).next_u64(),
                        )
                    })?;
                    rows.push(SweepRow {
                        experiment: "wf_global",
                        d: *d,
                        delta_or_k: k,
                        snr,
                        iterations: *iterations,
                        mean_error_db: mean(results.iter().map(|r| r.error_db)),
                        mean_runtime_s: mean(results.iter().map(|r| r.runtime_seconds)),
                        trials: cfg.trials,
                        seed: cfg.seed,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Conditioning reports for the exponential reference operator at the given
/// supports (`d = 3(2 delta - 1)` unless fixed).
pub fn conditioning_reports(
    deltas: &[usize],
    fixed_d: Option<usize>,
) -> Result<Vec<lift::ConditioningReport>> {
    let mut reports = Vec::new();
    for &delta in deltas {
        let q = 2 * delta - 1;
        let d = fixed_d.unwrap_or(3 * q);
        let family = masks::DerivedMaskFamily::new(
            (0..q)
                .map(|l| masks::fpr_mask(d, delta, l))
                .collect::<nfp_core::Result<_>>()?,
        );
        let operator = LiftedOperator::assemble(&family, d, delta)?;
        reports.push(operator.conditioning());
    }
    Ok(reports)
}
