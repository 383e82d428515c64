//! Mask and point-spread-function families for the forward model, and the
//! windowed masks derived from a (PSF, mask) pair.
//!
//! Two families matter for the block recovery pipeline:
//!
//! - the exponential reference masks (locally supported, exponentially
//!   decaying envelope, harmonic phase ramps), whose lifted operator has a
//!   provable condition-number bound; and
//! - the admissible (PSF, mask) pair built from quadratic chirps, whose
//!   derived masks equal phase-rotated reference masks. That modulation
//!   identity is what transfers the conditioning guarantee to the
//!   convolutional measurement model.

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::signal::ComplexSignal;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Tolerance for validating a claimed PSF periodicity.
const PERIODICITY_TOL: f64 = 1e-12;

/// A mask with a recorded support bound: entries outside `[0, delta)` are
/// zero for locally supported constructions, and `delta = d` for globally
/// supported masks.
#[derive(Clone, Debug)]
pub struct MaskSpec {
    m: ComplexSignal,
    delta: usize,
}

impl MaskSpec {
    /// Wrap a mask whose support must lie in `[0, delta)`.
    pub fn with_support(m: ComplexSignal, delta: usize) -> Result<Self> {
        if delta == 0 || delta > m.len() {
            return Err(Error::Config(
                "mask support bound must satisfy 1 <= delta <= d",
            ));
        }
        for n in delta..m.len() {
            if m.get(n as i64).norm() != 0.0 {
                return Err(Error::Config(
                    "mask has nonzero entries beyond its support bound",
                ));
            }
        }
        Ok(MaskSpec { m, delta })
    }

    /// Wrap a globally supported mask (`delta = d`).
    pub fn global(m: ComplexSignal) -> Self {
        let delta = m.len();
        MaskSpec { m, delta }
    }

    pub fn signal(&self) -> &ComplexSignal {
        &self.m
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A point spread function, optionally carrying a validated periodicity.
#[derive(Clone, Debug)]
pub struct PsfSpec {
    p: ComplexSignal,
    periodicity: Option<usize>,
}

impl PsfSpec {
    pub fn new(p: ComplexSignal, periodicity_claim: Option<usize>) -> Result<Self> {
        if let Some(q) = periodicity_claim {
            if q == 0 || q > p.len() {
                return Err(Error::Config(
                    "claimed periodicity must satisfy 1 <= q <= d",
                ));
            }
            let scale = p.norm_inf().max(1.0);
            for n in 0..p.len() {
                let diff = (p.get(n as i64 + q as i64) - p.get(n as i64)).norm();
                if diff > PERIODICITY_TOL * scale {
                    return Err(Error::Config(
                        "PSF does not satisfy its claimed periodicity",
                    ));
                }
            }
        }
        Ok(PsfSpec {
            p,
            periodicity: periodicity_claim,
        })
    }

    pub fn signal(&self) -> &ComplexSignal {
        &self.p
    }

    pub fn periodicity(&self) -> Option<usize> {
        self.periodicity
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The windowed masks obtained from a (PSF, mask) pair, one per detector
/// offset.
#[derive(Clone, Debug)]
pub struct DerivedMaskFamily {
    masks: Vec<ComplexSignal>,
}

impl DerivedMaskFamily {
    pub fn new(masks: Vec<ComplexSignal>) -> Self {
        assert!(!masks.is_empty());
        DerivedMaskFamily { masks }
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mask(&self, ell: usize) -> &ComplexSignal {
        &self.masks[ell]
    }

    pub fn masks(&self) -> &[ComplexSignal] {
        &self.masks
    }

    pub fn signal_len(&self) -> usize {
        self.masks[0].len()
    }
}

/// Envelope decay scale `a = max(4, (delta - 1) / 2)`.
pub fn mask_decay_scale(delta: usize) -> f64 {
    (4.0f64).max((delta as f64 - 1.0) / 2.0)
}

/// Exponential reference mask with index `ell`: entries
/// `exp(-(n+1)/a) / (2 delta - 1)^{1/4} * exp(2 pi i n ell / (2 delta - 1))`
/// on `[0, delta)`, zero elsewhere.
pub fn fpr_mask(d: usize, delta: usize, ell: usize) -> Result<ComplexSignal> {
    if delta == 0 || delta > d {
        return Err(Error::Dimension {
            what: "reference mask support",
            expected: d,
            got: delta,
        });
    }
    let q = 2 * delta - 1;
    let a = mask_decay_scale(delta);
    let amp = 1.0 / (q as f64).powf(0.25);
    Ok(ComplexSignal::from_fn(d, |n| {
        if n < delta {
            let envelope = amp * (-((n + 1) as f64) / a).exp();
            let phase = 2.0 * PI * ((n * ell) % q) as f64 / q as f64;
            Complex64::from_polar(envelope, phase)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// The admissible (PSF, mask) pair: a quadratic-chirp PSF
/// `p_n = exp(-2 pi i n^2 / (2 delta - 1))` (which is `2 delta - 1`
/// periodic) and a chirped exponential mask supported on `[0, delta)`.
/// Requires `2 delta - 1` to divide `d`.
pub fn admissible_pair(d: usize, delta: usize) -> Result<(PsfSpec, MaskSpec)> {
    if delta == 0 || delta > d {
        return Err(Error::Dimension {
            what: "admissible pair support",
            expected: d,
            got: delta,
        });
    }
    let q = 2 * delta - 1;
    if d % q != 0 {
        return Err(Error::Config(
            "admissible pair requires 2*delta - 1 to divide d",
        ));
    }
    let chirp = |n: usize| 2.0 * PI * ((n * n) % q) as f64 / q as f64;
    let p = ComplexSignal::from_fn(d, |n| Complex64::from_polar(1.0, -chirp(n)));
    let a = mask_decay_scale(delta);
    let amp = 1.0 / (q as f64).powf(0.25);
    let m = ComplexSignal::from_fn(d, |n| {
        if n < delta {
            Complex64::from_polar(amp * (-((n + 1) as f64) / a).exp(), chirp(n))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let psf = PsfSpec::new(p, Some(q))?;
    let mask = MaskSpec::with_support(m, delta)?;
    Ok((psf, mask))
}

/// Windowed masks `conj(S_ell p~ o m)` for `ell = 0, ..., count - 1`, where
/// `p~` is the reversal of the PSF about its first entry.
pub fn derive_masks(p: &PsfSpec, m: &MaskSpec, count: usize) -> Result<DerivedMaskFamily> {
    if count == 0 {
        return Err(Error::Config("mask family needs at least one offset"));
    }
    if p.len() != m.len() {
        return Err(Error::Dimension {
            what: "derived mask family",
            expected: p.len(),
            got: m.len(),
        });
    }
    let reversed = p.signal().reversed();
    let masks = (0..count)
        .map(|ell| {
            reversed
                .shift(ell as i64)
                .hadamard(m.signal())
                .map(|s| s.conj())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DerivedMaskFamily::new(masks))
}

/// Ideal low-pass PSF: the inverse DFT of a `gamma`-wide frequency window
/// (the window of ones shifted by `-(gamma - 1)/2`). `gamma` must be odd.
pub fn lowpass_psf(d: usize, gamma: usize) -> Result<PsfSpec> {
    if gamma == 0 || gamma > d {
        return Err(Error::Dimension {
            what: "low-pass bandwidth",
            expected: d,
            got: gamma,
        });
    }
    if gamma % 2 == 0 {
        return Err(Error::Config(
            "low-pass bandwidth must be odd to center the window",
        ));
    }
    let indicator = ComplexSignal::from_fn(d, |n| {
        if n < gamma {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let spectrum = indicator.shift(-((gamma as i64 - 1) / 2));
    let p = spectrum.idft();
    PsfSpec::new(p, None)
}

/// Random mask with i.i.d. complex Gaussian entries of unit total variance
/// (each part N(0, 1/2)); globally supported and reproducible from the seed.
pub fn random_mask(d: usize, seed: u64) -> MaskSpec {
    let mut rng = Rng::new(seed);
    let sigma = (0.5f64).sqrt();
    MaskSpec::global(ComplexSignal::random_normal(d, sigma, &mut rng))
}

/// Phase factor `exp(2 pi i ell^2 / (2 delta - 1))` relating a derived mask
/// of the admissible pair to the reference mask of index
/// `2 ell mod (2 delta - 1)`.
pub fn modulation_phase(delta: usize, ell: usize) -> Complex64 {
    let q = 2 * delta - 1;
    Complex64::from_polar(1.0, 2.0 * PI * ((ell * ell) % q) as f64 / q as f64)
}
