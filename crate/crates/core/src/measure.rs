//! Forward simulation of phaseless measurements and SNR-targeted noise.
//!
//! Near-field intensities are `|(p * (S_k m o x))_l|^2` evaluated on an index
//! set; far-field intensities are `|<m_l, S_k x>|^2` for a derived mask
//! family. Grids store their values in logical row-major `(k, l)` order so a
//! stacked read-out of a far-field grid is exactly the right-hand side of the
//! lifted linear system.

use crate::error::{Error, Result};
use crate::masks::{DerivedMaskFamily, MaskSpec, PsfSpec};
use crate::rng::Rng;
use crate::signal::{imod, ComplexSignal};

/// Index sets for near-field measurement simulation, in logical `(k, l)`
/// coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum IndexSet {
    /// All `d` shifts, detector offsets `[0, 2 delta - 1)`; physical indices
    /// equal logical indices.
    FullGrid { d: usize, delta: usize },
    /// `k_count * l_count` pairs; logical `(k, l)` maps to physical shift
    /// `(-k) mod d` and offset `(k - l) mod d`. This restriction makes the
    /// near-to-far rearrangement valid without any PSF periodicity.
    DiagonalBand {
        d: usize,
        k_count: usize,
        l_count: usize,
    },
}

impl IndexSet {
    pub fn full_grid(d: usize, delta: usize) -> Result<Self> {
        if delta == 0 || 2 * delta - 1 > d {
            return Err(Error::Config("full grid requires 1 <= 2*delta - 1 <= d"));
        }
        Ok(IndexSet::FullGrid { d, delta })
    }

    pub fn diagonal_band(d: usize, k_count: usize, l_count: usize) -> Result<Self> {
        if k_count == 0 || l_count == 0 || k_count > d || l_count > d {
            return Err(Error::Config(
                "diagonal band requires 1 <= K <= d and 1 <= L <= d",
            ));
        }
        Ok(IndexSet::DiagonalBand {
            d,
            k_count,
            l_count,
        })
    }

    pub fn d(&self) -> usize {
        match *self {
            IndexSet::FullGrid { d, .. } | IndexSet::DiagonalBand { d, .. } => d,
        }
    }

    pub fn k_count(&self) -> usize {
        match *self {
            IndexSet::FullGrid { d, .. } => d,
            IndexSet::DiagonalBand { k_count, .. } => k_count,
        }
    }

    pub fn l_count(&self) -> usize {
        match *self {
            IndexSet::FullGrid { delta, .. } => 2 * delta - 1,
            IndexSet::DiagonalBand { l_count, .. } => l_count,
        }
    }

    pub fn len(&self) -> usize {
        self.k_count() * self.l_count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical `(shift, offset)` pair of a logical `(k, l)` entry.
    pub fn physical(&self, k: usize, l: usize) -> (usize, usize) {
        match *self {
            IndexSet::FullGrid { .. } => (k, l),
            IndexSet::DiagonalBand { d, .. } => {
                (imod(-(k as i64), d), imod(k as i64 - l as i64, d))
            }
        }
    }
}

/// Label for what a grid's logical coordinates mean.
#[derive(Clone, Debug, PartialEq)]
pub enum GridKind {
    /// Near-field intensities over an [`IndexSet`].
    Nfp(IndexSet),
    /// Far-field intensities over `[0, K) x [0, L)` (direct simulation or a
    /// rearranged near-field grid).
    Ffp { k_count: usize, l_count: usize },
}

/// Phaseless intensities over an index set, with optional recorded noise.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementGrid {
    kind: GridKind,
    d: usize,
    values: Vec<f64>,
    noise: Option<Vec<f64>>,
    target_snr_db: Option<f64>,
}

/// Target signal-to-noise ratio for additive measurement noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SnrTarget {
    /// `10 log10(||Y_clean||_F / ||N||_F)` equals this value exactly.
    Db(f64),
    /// The infinite-SNR limit: zero noise.
    Clean,
}

/// Noise draw: i.i.d. mean-zero Gaussian over the grid, rescaled to meet the
/// target SNR exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub target: SnrTarget,
    pub seed: u64,
}

impl MeasurementGrid {
    pub(crate) fn new(kind: GridKind, d: usize, values: Vec<f64>) -> Self {
        MeasurementGrid {
            kind,
            d,
            values,
            noise: None,
            target_snr_db: None,
        }
    }

    pub(crate) fn with_noise(
        kind: GridKind,
        d: usize,
        values: Vec<f64>,
        noise: Vec<f64>,
        target_snr_db: Option<f64>,
    ) -> Self {
        MeasurementGrid {
            kind,
            d,
            values,
            noise: Some(noise),
            target_snr_db,
        }
    }

    pub fn kind(&self) -> &GridKind {
        &self.kind
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k_count(&self) -> usize {
        match &self.kind {
            GridKind::Nfp(idx) => idx.k_count(),
            GridKind::Ffp { k_count, .. } => *k_count,
        }
    }

    pub fn l_count(&self) -> usize {
        match &self.kind {
            GridKind::Nfp(idx) => idx.l_count(),
            GridKind::Ffp { l_count, .. } => *l_count,
        }
    }

    #[inline]
    pub fn value(&self, k: usize, l: usize) -> f64 {
        self.values[k * self.l_count() + l]
    }

    pub fn noise_value(&self, k: usize, l: usize) -> Option<f64> {
        self.noise.as_ref().map(|n| n[k * self.l_count() + l])
    }

    /// Logical row-major values; for a far-field grid this is the stacked
    /// right-hand side of the lifted system.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn noise(&self) -> Option<&[f64]> {
        self.noise.as_deref()
    }

    pub fn target_snr_db(&self) -> Option<f64> {
        self.target_snr_db
    }

    pub fn has_noise(&self) -> bool {
        self.noise.is_some()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Achieved SNR `10 log10(||Y - N||_F / ||N||_F)` of a noisy grid.
    pub fn achieved_snr_db(&self) -> Option<f64> {
        let noise = self.noise.as_ref()?;
        let clean_norm = self
            .values
            .iter()
            .zip(noise)
            .map(|(y, n)| (y - n) * (y - n))
            .sum::<f64>()
            .sqrt();
        let noise_norm = noise.iter().map(|n| n * n).sum::<f64>().sqrt();
        if noise_norm == 0.0 {
            return Some(f64::INFINITY);
        }
        Some(10.0 * (clean_norm / noise_norm).log10())
    }
}

/// Near-field forward model: `|(p * (S_k m o x))_l|^2` over the index set.
pub fn forward_nfp(
    x: &ComplexSignal,
    p: &PsfSpec,
    m: &MaskSpec,
    idx: &IndexSet,
) -> Result<MeasurementGrid> {
    let d = x.len();
    if p.len() != d || m.len() != d || idx.d() != d {
        return Err(Error::Dimension {
            what: "near-field forward model",
            expected: d,
            got: if p.len() != d {
                p.len()
            } else {
                m.len().min(idx.d())
            },
        });
    }
    let k_count = idx.k_count();
    let l_count = idx.l_count();
    let mut values = vec![0.0; k_count * l_count];
    // One convolution per distinct physical shift.
    let mut diffraction: Vec<Option<ComplexSignal>> = vec![None; d];
    for k in 0..k_count {
        let (shift, _) = idx.physical(k, 0);
        if diffraction[shift].is_none() {
            let windowed = m.signal().shift(shift as i64).hadamard(x)?;
            diffraction[shift] = Some(p.signal().convolve(&windowed)?);
        }
        let pattern = diffraction[shift].as_ref().unwrap();
        for l in 0..l_count {
            let (_, offset) = idx.physical(k, l);
            values[k * l_count + l] = pattern.get(offset as i64).norm_sqr();
        }
    }
    Ok(MeasurementGrid::new(GridKind::Nfp(idx.clone()), d, values))
}

/// Far-field forward model: `|<m_l, S_k x>|^2` over `[0, K) x [0, L)` with
/// `L` the family size.
pub fn forward_ffp(
    x: &ComplexSignal,
    family: &DerivedMaskFamily,
    k_count: usize,
) -> Result<MeasurementGrid> {
    let d = x.len();
    if family.signal_len() != d {
        return Err(Error::Dimension {
            what: "far-field forward model",
            expected: d,
            got: family.signal_len(),
        });
    }
    if k_count == 0 || k_count > d {
        return Err(Error::Config("shift count must satisfy 1 <= K <= d"));
    }
    let l_count = family.len();
    let mut values = vec![0.0; k_count * l_count];
    for k in 0..k_count {
        let shifted = x.shift(k as i64);
        for l in 0..l_count {
            values[k * l_count + l] = family.mask(l).inner(&shifted)?.norm_sqr();
        }
    }
    Ok(MeasurementGrid::new(
        GridKind::Ffp { k_count, l_count },
        d,
        values,
    ))
}

/// Add mean-zero Gaussian noise rescaled so the achieved SNR matches the
/// target exactly; the draw is deterministic in the spec's seed and index
/// order, independent of any parallelism in the caller.
pub fn add_noise(grid: &MeasurementGrid, spec: &NoiseSpec) -> Result<MeasurementGrid> {
    if grid.has_noise() {
        return Err(Error::Config("grid already carries noise"));
    }
    let n_entries = grid.values().len();
    match spec.target {
        SnrTarget::Clean => Ok(MeasurementGrid::with_noise(
            grid.kind().clone(),
            grid.d(),
            grid.values().to_vec(),
            vec![0.0; n_entries],
            None,
        )),
        SnrTarget::Db(snr_db) => {
            if !snr_db.is_finite() {
                return Err(Error::Config("target SNR must be finite (or use Clean)"));
            }
            let clean_norm = grid.frobenius_norm();
            if clean_norm == 0.0 {
                return Err(Error::DegenerateInput(
                    "cannot target an SNR against all-zero measurements",
                ));
            }
            let mut rng = Rng::new(spec.seed);
            let mut noise: Vec<f64> = (0..n_entries).map(|_| rng.normal()).collect();
            let raw_norm = noise.iter().map(|v| v * v).sum::<f64>().sqrt();
            if raw_norm == 0.0 {
                return Err(Error::DegenerateInput("drawn noise collapsed to zero"));
            }
            // ||N|| = ||Y_clean|| / 10^(snr/10)
            let target_norm = clean_norm / 10f64.powf(snr_db / 10.0);
            let scale = target_norm / raw_norm;
            for v in &mut noise {
                *v *= scale;
            }
            let values: Vec<f64> = grid
                .values()
                .iter()
                .zip(&noise)
                .map(|(y, n)| y + n)
                .collect();
            Ok(MeasurementGrid::with_noise(
                grid.kind().clone(),
                grid.d(),
                values,
                noise,
                Some(snr_db),
            ))
        }
    }
}
