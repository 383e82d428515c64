//! Wirtinger Flow on rearranged measurements: amplitude-squared least
//! squares with spectral initialization and a saturating stepsize schedule.
//!
//! A far-field grid over `[0, K) x [0, L)` vectorizes to `y_n` with sensing
//! vectors `a_n = S_{-floor(n/L)} m_{n mod L}`, so each noiseless entry is
//! `|a_n^* x|^2`. The loss is `f(z) = (1/KL) sum_n (|a_n^* z|^2 - y_n)^2`
//! and descent uses the Wirtinger gradient scaled so coordinate-wise finite
//! differences of `f` match the gradient's real and imaginary parts.

use crate::error::{Error, Result};
use crate::linalg::{power_iteration, seeded_start, vec_norm};
use crate::masks::DerivedMaskFamily;
use crate::measure::{GridKind, MeasurementGrid};
use crate::signal::ComplexSignal;
use num_complex::Complex64;

/// Spectral initialization: power-iteration tolerance and cap.
const INIT_TOL: f64 = 1e-8;
const INIT_MAX_ITERS: usize = 5000;

/// Squared norm given to every sensing vector by row equilibration, as a
/// fraction of the signal dimension. Scaling a row's `(a_n, y_n)` pair by a
/// common factor preserves the consistency `y_n = |a_n^* x|^2`, so the
/// equilibrated system has the same solutions; it conditions both the
/// spectral initializer and the descent, whose stepsize schedule is
/// calibrated for sensing vectors of roughly this energy.
const SENSING_ENERGY_FRACTION: f64 = 1.0 / 3.0;

/// Measurement vector plus sensing vectors for the quartic loss.
#[derive(Clone, Debug)]
pub struct WfProblem {
    y: Vec<f64>,
    sensing: Vec<ComplexSignal>,
    d: usize,
    k_count: usize,
    l_count: usize,
    /// Per-row scales `s_n` applied as `a_n -> a_n/s_n`, `y_n -> y_n/s_n^2`.
    sensing_scales: Vec<f64>,
}

impl WfProblem {
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn sensing(&self) -> &[ComplexSignal] {
        &self.sensing
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k_count(&self) -> usize {
        self.k_count
    }

    pub fn l_count(&self) -> usize {
        self.l_count
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// The per-row scales by which the raw measurements and sensing vectors
    /// were divided (`y_raw[n] = s_n^2 y[n]`, `a_raw[n] = s_n a[n]`).
    pub fn sensing_scales(&self) -> &[f64] {
        &self.sensing_scales
    }

    /// `a_n^* z` for every sensing vector.
    fn correlations(&self, z: &ComplexSignal) -> Vec<Complex64> {
        // a_n^* z = <z, a_n>
        self.sensing
            .iter()
            .map(|a| z.inner(a).expect("sensing vectors match the signal length"))
            .collect()
    }
}

/// Stepsize schedule for the descent updates.
#[derive(Clone, Debug, PartialEq)]
pub enum StepSchedule {
    /// `mu_tau = min(1 - exp(-tau/330), 0.4)`.
    Saturating,
    /// A fixed stepsize in (0, 1].
    Constant(f64),
    /// The saturating schedule clipped at a smaller ceiling.
    SaturatingCapped(f64),
}

impl StepSchedule {
    pub fn stepsize(&self, tau: usize) -> f64 {
        let saturating = 1.0 - (-(tau as f64) / 330.0).exp();
        match *self {
            StepSchedule::Saturating => saturating.min(0.4),
            StepSchedule::Constant(mu) => mu,
            StepSchedule::SaturatingCapped(cap) => saturating.min(cap),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            StepSchedule::Saturating => true,
            StepSchedule::Constant(mu) => mu > 0.0 && mu <= 1.0,
            StepSchedule::SaturatingCapped(cap) => cap > 0.0 && cap <= 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config("stepsizes must lie in (0, 1]"))
        }
    }
}

/// Initialization choice for the descent.
#[derive(Clone, Debug)]
pub enum WfInit {
    Spectral,
    Provided(ComplexSignal),
}

/// Descent configuration.
#[derive(Clone, Debug)]
pub struct WfConfig {
    pub iterations: usize,
    pub schedule: StepSchedule,
    pub init: WfInit,
    pub seed: u64,
}

impl WfConfig {
    pub fn new(iterations: usize, seed: u64) -> Self {
        WfConfig {
            iterations,
            schedule: StepSchedule::Saturating,
            init: WfInit::Spectral,
            seed,
        }
    }
}

/// Per-iteration record of the run: loss at every iterate and, when the
/// truth is supplied, the phase-invariant relative error.
#[derive(Clone, Debug, Default)]
pub struct WfTrace {
    pub loss: Vec<f64>,
    pub relative_error: Option<Vec<f64>>,
}

/// Stack a far-field grid into a measurement vector with its sensing
/// vectors: `y_n = Ytilde[floor(n/L)][n mod L]`,
/// `a_n = S_{-floor(n/L)} m_{n mod L}`.
pub fn vectorize_measurements(
    grid: &MeasurementGrid,
    family: &DerivedMaskFamily,
) -> Result<WfProblem> {
    match grid.kind() {
        GridKind::Ffp { .. } => {}
        GridKind::Nfp(_) => {
            return Err(Error::Config(
                "vectorization expects a far-field (rearranged) grid",
            ))
        }
    }
    let (k_count, l_count) = (grid.k_count(), grid.l_count());
    if family.len() < l_count {
        return Err(Error::Dimension {
            what: "mask family for vectorization",
            expected: l_count,
            got: family.len(),
        });
    }
    if family.signal_len() != grid.d() {
        return Err(Error::Dimension {
            what: "mask length for vectorization",
            expected: grid.d(),
            got: family.signal_len(),
        });
    }
    let target_norm = (SENSING_ENERGY_FRACTION * grid.d() as f64).sqrt();
    let mut sensing = Vec::with_capacity(k_count * l_count);
    let mut y = Vec::with_capacity(k_count * l_count);
    let mut sensing_scales = Vec::with_capacity(k_count * l_count);
    for k in 0..k_count {
        for l in 0..l_count {
            let a = family.mask(l).shift(-(k as i64));
            // Row equilibration (see SENSING_ENERGY_FRACTION). Noiseless
            // consistency y_n = |a_n^* x|^2 is preserved row by row.
            let norm = a.norm();
            let scale = if norm > 0.0 { norm / target_norm } else { 1.0 };
            sensing.push(a.scaled(Complex64::new(1.0 / scale, 0.0)));
            y.push(grid.value(k, l) / (scale * scale));
            sensing_scales.push(scale);
        }
    }
    Ok(WfProblem {
        y,
        sensing,
        d: grid.d(),
        k_count,
        l_count,
        sensing_scales,
    })
}

/// Spectral initialization: scaled top eigenvector of
/// `(1/KL) sum_n y_n a_n a_n^*`, with norm `sqrt(d sum y / sum ||a_n||^2)`.
pub fn spectral_init(prob: &WfProblem, seed: u64) -> Result<ComplexSignal> {
    if prob.is_empty() {
        return Err(Error::DegenerateInput("no measurements to initialize from"));
    }
    let d = prob.d();
    let y_sum: f64 = prob.y.iter().sum();
    let a_norm_sum: f64 = prob.sensing.iter().map(ComplexSignal::norm_sq).sum();
    let lambda = (d as f64 * y_sum / a_norm_sum).max(0.0).sqrt();
    if lambda == 0.0 {
        return Ok(ComplexSignal::zeros(d));
    }
    let inv_m = 1.0 / prob.len() as f64;
    let apply = |v: &[Complex64]| -> Vec<Complex64> {
        let vs = ComplexSignal::new(v.to_vec());
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for (a, &yn) in prob.sensing.iter().zip(&prob.y) {
            // y_n a_n (a_n^* v)
            let corr = vs.inner(a).unwrap() * (yn * inv_m);
            for (o, an) in out.iter_mut().zip(a.iter()) {
                *o += an * corr;
            }
        }
        out
    };
    let start = seeded_start(d, seed);
    let (_, v) = power_iteration(
        apply,
        &start,
        INIT_TOL,
        INIT_MAX_ITERS,
        "spectral initialization",
    )?;
    let norm = vec_norm(&v);
    Ok(ComplexSignal::new(
        v.into_iter().map(|z| z * (lambda / norm)).collect(),
    ))
}

/// Quartic amplitude loss `(1/KL) sum_n (|a_n^* z|^2 - y_n)^2`.
pub fn loss(prob: &WfProblem, z: &ComplexSignal) -> f64 {
    let inv_m = 1.0 / prob.len() as f64;
    prob.correlations(z)
        .iter()
        .zip(&prob.y)
        .map(|(c, &yn)| {
            let r = c.norm_sqr() - yn;
            r * r
        })
        .sum::<f64>()
        * inv_m
}

/// Wirtinger gradient `(4/KL) sum_n (|a_n^* z|^2 - y_n) a_n (a_n^* z)`,
/// normalized so that central differences of the loss along each real and
/// imaginary coordinate reproduce the gradient's components.
pub fn gradient(prob: &WfProblem, z: &ComplexSignal) -> ComplexSignal {
    let d = prob.d();
    let scale = 4.0 / prob.len() as f64;
    let mut g = vec![Complex64::new(0.0, 0.0); d];
    for (a, &yn) in prob.sensing.iter().zip(&prob.y) {
        let corr = z.inner(a).unwrap();
        let weight = (corr.norm_sqr() - yn) * scale;
        let factor = corr * weight;
        for (gi, an) in g.iter_mut().zip(a.iter()) {
            *gi += an * factor;
        }
    }
    ComplexSignal::new(g)
}

/// Run the descent `z_{tau+1} = z_tau - (mu_{tau+1} / ||z_0||^2) grad f(z_tau)`
/// for the configured number of iterations, recording the loss trace (and the
/// relative error against `truth` when given).
pub fn run(
    prob: &WfProblem,
    cfg: &WfConfig,
    truth: Option<&ComplexSignal>,
) -> Result<(ComplexSignal, WfTrace)> {
    cfg.schedule.validate()?;
    let mut z = match &cfg.init {
        WfInit::Spectral => spectral_init(prob, cfg.seed)?,
        WfInit::Provided(z0) => {
            if z0.len() != prob.d() {
                return Err(Error::Dimension {
                    what: "provided initializer",
                    expected: prob.d(),
                    got: z0.len(),
                });
            }
            z0.clone()
        }
    };
    let z0_norm_sq = z.norm_sq();
    if z0_norm_sq == 0.0 {
        return Err(Error::DegenerateInput("initializer has zero norm"));
    }
    let mut trace = WfTrace {
        loss: Vec::with_capacity(cfg.iterations + 1),
        relative_error: truth.map(|_| Vec::with_capacity(cfg.iterations + 1)),
    };
    let record = |z: &ComplexSignal, trace: &mut WfTrace, iteration: usize| -> Result<()> {
        let f = loss(prob, z);
        if !f.is_finite() {
            return Err(Error::Divergence { iteration });
        }
        trace.loss.push(f);
        if let (Some(errs), Some(x)) = (trace.relative_error.as_mut(), truth) {
            errs.push(crate::metrics::relative_recovery_error(x, z)?);
        }
        Ok(())
    };
    record(&z, &mut trace, 0)?;
    for tau in 0..cfg.iterations {
        let g = gradient(prob, &z);
        let mu = cfg.schedule.stepsize(tau + 1);
        let step = mu / z0_norm_sq;
        z = z.sub(&g.scaled(Complex64::new(step, 0.0)))?;
        record(&z, &mut trace, tau + 1)?;
    }
    Ok((z, trace))
}
