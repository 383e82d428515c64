//! The lifted linear view of the measurements: rearranging near-field grids
//! into far-field form, assembling the block-circulant operator that maps the
//! banded autocorrelation of the signal to those intensities, solving it in
//! the Fourier domain, and reporting its conditioning.
//!
//! With masks supported on `[0, delta)`, expanding `|<m_l, S_k x>|^2` shows
//! each measurement is a linear functional of the products
//! `x_k conj(x_{k+j})` with circular offset `|j| < delta`. Stacking those
//! products block-by-block turns the full measurement grid into `M z = y`
//! with `M` block circulant; a DFT across block positions decouples it into
//! `d` independent small dense systems.

use crate::error::{Error, Result};
use crate::fft;
use crate::linalg::{lu_factor, svd_jacobi, CMat, Svd};
use crate::masks::DerivedMaskFamily;
use crate::measure::{GridKind, IndexSet, MeasurementGrid};
use crate::signal::{imod, ComplexSignal};
use num_complex::Complex64;

/// A Fourier block counts as singular when its smallest singular value drops
/// below this fraction of the largest singular value of the whole operator.
const SINGULAR_BLOCK_REL: f64 = 1e-12;

/// Largest total dimension accepted by the dense cross-check solver.
const DENSE_SOLVE_MAX_DIM: usize = 2000;

// ---------------------------------------------------------------------------
// Near-to-far rearrangement
// ---------------------------------------------------------------------------

/// Rearrange a near-field grid into the equivalent far-field grid:
/// `Ytilde[k][l] = Y[(-k) mod d][(k - l) mod (2 delta - 1)]` for the full
/// grid (valid when the PSF has period `2 delta - 1`), and the analogous
/// mod-`d` relabeling for a diagonal band (valid for any PSF). The index map
/// is a bijection; values and recorded noise are permuted, never combined.
pub fn rearrange_near_to_far(grid: &MeasurementGrid) -> Result<MeasurementGrid> {
    let idx = match grid.kind() {
        GridKind::Nfp(idx) => idx.clone(),
        GridKind::Ffp { .. } => {
            return Err(Error::Config(
                "rearrangement expects a near-field grid over a supported index set",
            ))
        }
    };
    let d = grid.d();
    let (k_count, l_count) = (grid.k_count(), grid.l_count());
    let mut values = vec![0.0; k_count * l_count];
    let mut noise = grid.noise().map(|_| vec![0.0; k_count * l_count]);
    for k in 0..k_count {
        for l in 0..l_count {
            let (src_k, src_l) = match idx {
                IndexSet::FullGrid { delta, .. } => (
                    imod(-(k as i64), d),
                    imod(k as i64 - l as i64, 2 * delta - 1),
                ),
                // Diagonal-band storage is already laid out by the logical
                // (k, l) the rearrangement produces.
                IndexSet::DiagonalBand { .. } => (k, l),
            };
            values[k * l_count + l] = grid.value(src_k, src_l);
            if let Some(n) = noise.as_mut() {
                n[k * l_count + l] = grid.noise_value(src_k, src_l).unwrap();
            }
        }
    }
    Ok(match noise {
        Some(n) => MeasurementGrid::with_noise(
            GridKind::Ffp { k_count, l_count },
            d,
            values,
            n,
            grid.target_snr_db(),
        ),
        None => MeasurementGrid::new(GridKind::Ffp { k_count, l_count }, d, values),
    })
}

// ---------------------------------------------------------------------------
// Lifted vector packing
// ---------------------------------------------------------------------------

/// Banded rank-one products of a signal, stacked as `d` blocks of length
/// `2 delta - 1`: block `k`, slot `j` holds `x_k conj(x_{k + off(j)})` with
/// `off(j) = j` for `j < delta` and `off(j) = j - (2 delta - 1)` otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedVector {
    z: Vec<Complex64>,
    d: usize,
    delta: usize,
}

/// Signed circular offset encoded by slot `j`.
#[inline]
pub(crate) fn slot_offset(j: usize, delta: usize) -> i64 {
    if j < delta {
        j as i64
    } else {
        j as i64 - (2 * delta as i64 - 1)
    }
}

impl LiftedVector {
    pub fn new(z: Vec<Complex64>, d: usize, delta: usize) -> Result<Self> {
        if z.len() != d * (2 * delta - 1) {
            return Err(Error::Dimension {
                what: "lifted vector",
                expected: d * (2 * delta - 1),
                got: z.len(),
            });
        }
        Ok(LiftedVector { z, d, delta })
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.z
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Entry of block `k`, slot `j`.
    pub fn block_entry(&self, k: usize, j: usize) -> Complex64 {
        self.z[k * (2 * self.delta - 1) + j]
    }
}

/// Pack the banded products of `x` into a lifted vector.
pub fn pack_lifted(x: &ComplexSignal, delta: usize) -> LiftedVector {
    let d = x.len();
    let q = 2 * delta - 1;
    let mut z = Vec::with_capacity(d * q);
    for k in 0..d {
        let xk = x.get(k as i64);
        for j in 0..q {
            let other = x.get(k as i64 + slot_offset(j, delta));
            z.push(xk * other.conj());
        }
    }
    LiftedVector { z, d, delta }
}

// ---------------------------------------------------------------------------
// Block-circulant lifted operator
// ---------------------------------------------------------------------------

/// The block-circulant lifted operator: `delta` distinct blocks of size
/// `(2 delta - 1) x (2 delta - 1)`, with block `(i, q)` of the full matrix
/// equal to block `(q - i) mod d` when that index is below `delta` and zero
/// otherwise.
#[derive(Clone, Debug)]
pub struct LiftedOperator {
    blocks: Vec<CMat>,
    d: usize,
    delta: usize,
}

/// Extreme singular values over all Fourier blocks and the theoretical
/// condition-number bound for the exponential reference masks.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditioningReport {
    pub d: usize,
    pub delta: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub kappa: f64,
    pub bound: f64,
}

/// Condition-number bound `max(144 e^2, 9 e^2 (delta - 1)^2 / 4)` proven for
/// the exponential reference masks.
pub fn reference_condition_bound(delta: usize) -> f64 {
    let e2 = (std::f64::consts::E).powi(2);
    (144.0 * e2).max(9.0 * e2 * ((delta as f64 - 1.0).powi(2)) / 4.0)
}

impl LiftedOperator {
    /// Assemble the operator from a family of `2 delta - 1` masks supported
    /// on `[0, delta)`. Block `s` has entries
    /// `conj((m_l)_s) (m_l)_{s + off(j)}` wherever the mask support allows,
    /// and zero otherwise. Requires `2 delta - 1` to divide `d`.
    pub fn assemble(family: &DerivedMaskFamily, d: usize, delta: usize) -> Result<Self> {
        let q = 2 * delta - 1;
        if family.len() != q {
            return Err(Error::Dimension {
                what: "mask family size for assembly",
                expected: q,
                got: family.len(),
            });
        }
        if family.signal_len() != d {
            return Err(Error::Dimension {
                what: "mask length for assembly",
                expected: d,
                got: family.signal_len(),
            });
        }
        if d % q != 0 {
            return Err(Error::Config(
                "lifted assembly requires 2*delta - 1 to divide d",
            ));
        }
        for l in 0..q {
            for n in delta..d {
                if family.mask(l).get(n as i64).norm() != 0.0 {
                    return Err(Error::Config(
                        "mask support exceeds [0, delta) so the lifted system is not banded",
                    ));
                }
            }
        }
        let mut blocks = Vec::with_capacity(delta);
        for s in 0..delta {
            let block = CMat::from_fn(q, q, |l, j| {
                // Case split on the slot's signed offset; entries vanish when
                // the partner index leaves the mask support.
                let within_case_one = j <= delta.saturating_sub(s + 1);
                let within_case_two = s >= 1 && j >= q - s && j <= q - 1;
                if within_case_one || within_case_two {
                    let partner = imod(s as i64 + slot_offset(j, delta), d);
                    family.mask(l).get(s as i64).conj() * family.mask(l).get(partner as i64)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            blocks.push(block);
        }
        Ok(LiftedOperator { blocks, d, delta })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Total dimension `d * (2 delta - 1)`.
    pub fn dim(&self) -> usize {
        self.d * (2 * self.delta - 1)
    }

    pub fn block(&self, s: usize) -> &CMat {
        &self.blocks[s]
    }

    /// Apply the full operator to a stacked vector.
    pub fn apply(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let q = 2 * self.delta - 1;
        if z.len() != self.dim() {
            return Err(Error::Dimension {
                what: "lifted operator application",
                expected: self.dim(),
                got: z.len(),
            });
        }
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim()];
        for i in 0..self.d {
            for (s, block) in self.blocks.iter().enumerate() {
                let src = ((i + s) % self.d) * q;
                for r in 0..q {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for c in 0..q {
                        acc += block.get(r, c) * z[src + c];
                    }
                    y[i * q + r] += acc;
                }
            }
        }
        Ok(y)
    }

    /// Fourier-domain blocks `Lambda_t = sum_s block_s exp(2 pi i s t / d)`.
    /// The operator's singular values are the union over `t` of each block's
    /// singular values.
    pub fn fourier_blocks(&self) -> Vec<CMat> {
        let q = 2 * self.delta - 1;
        (0..self.d)
            .map(|t| {
                let mut lam = CMat::zeros(q, q);
                for (s, block) in self.blocks.iter().enumerate() {
                    let w = crate::signal::root_of_unity(self.d, (s * t) as i64);
                    lam = lam.add(&block.scaled(w));
                }
                lam
            })
            .collect()
    }

    /// Factor every Fourier block (by SVD) for repeated solves, rejecting
    /// numerically singular blocks.
    pub fn factor(&self) -> Result<LiftedSolver> {
        let svds: Vec<Svd> = self.fourier_blocks().iter().map(svd_jacobi).collect();
        let sigma_max_global = svds.iter().map(Svd::sigma_max).fold(0.0, f64::max);
        for (t, svd) in svds.iter().enumerate() {
            if svd.sigma_min() < SINGULAR_BLOCK_REL * sigma_max_global {
                return Err(Error::IllPosedOperator {
                    block: t,
                    sigma_min: svd.sigma_min(),
                });
            }
        }
        Ok(LiftedSolver {
            svds,
            d: self.d,
            delta: self.delta,
        })
    }

    /// Solve `M z = y` through the Fourier-domain decoupling.
    pub fn solve(&self, y: &[Complex64]) -> Result<LiftedVector> {
        self.factor()?.solve(y)
    }

    /// Materialize the full matrix (cross-check path, desk scale only).
    pub fn to_dense(&self) -> CMat {
        let q = 2 * self.delta - 1;
        let dim = self.dim();
        let mut m = CMat::zeros(dim, dim);
        for i in 0..self.d {
            for s in 0..self.delta {
                let col_block = (i + s) % self.d;
                for r in 0..q {
                    for c in 0..q {
                        m.set(i * q + r, col_block * q + c, self.blocks[s].get(r, c));
                    }
                }
            }
        }
        m
    }

    /// Dense LU cross-check solve; refuses dimensions past desk scale.
    pub fn solve_dense(&self, y: &[Complex64]) -> Result<LiftedVector> {
        if self.dim() > DENSE_SOLVE_MAX_DIM {
            return Err(Error::Config("dense solve is limited to small dimensions"));
        }
        if y.len() != self.dim() {
            return Err(Error::Dimension {
                what: "dense lifted solve",
                expected: self.dim(),
                got: y.len(),
            });
        }
        let dense = self.to_dense();
        let z = lu_factor(&dense)?.solve(y);
        LiftedVector::new(z, self.d, self.delta)
    }

    /// Extreme singular values, condition number, and the theoretical bound.
    pub fn conditioning(&self) -> ConditioningReport {
        let mut sigma_min = f64::INFINITY;
        let mut sigma_max: f64 = 0.0;
        for lam in self.fourier_blocks() {
            let svd = svd_jacobi(&lam);
            sigma_min = sigma_min.min(svd.sigma_min());
            sigma_max = sigma_max.max(svd.sigma_max());
        }
        let kappa = if sigma_min > 0.0 {
            sigma_max / sigma_min
        } else {
            f64::INFINITY
        };
        ConditioningReport {
            d: self.d,
            delta: self.delta,
            sigma_min,
            sigma_max,
            kappa,
            bound: reference_condition_bound(self.delta),
        }
    }
}

/// Per-block SVD factors of a lifted operator, reusable across right-hand
/// sides.
pub struct LiftedSolver {
    svds: Vec<Svd>,
    d: usize,
    delta: usize,
}

impl LiftedSolver {
    pub fn solve(&self, y: &[Complex64]) -> Result<LiftedVector> {
        let q = 2 * self.delta - 1;
        let dim = self.d * q;
        if y.len() != dim {
            return Err(Error::Dimension {
                what: "lifted solve",
                expected: dim,
                got: y.len(),
            });
        }
        // DFT across block positions, one transform per slot.
        let mut yhat = vec![Complex64::new(0.0, 0.0); dim];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.d];
        for j in 0..q {
            for k in 0..self.d {
                scratch[k] = y[k * q + j];
            }
            let transformed = fft::fft(&scratch);
            for t in 0..self.d {
                yhat[t * q + j] = transformed[t];
            }
        }
        // Independent small solves.
        let mut zhat = vec![Complex64::new(0.0, 0.0); dim];
        for t in 0..self.d {
            let rhs = &yhat[t * q..(t + 1) * q];
            let sol = self.svds[t].solve(rhs);
            zhat[t * q..(t + 1) * q].copy_from_slice(&sol);
        }
        // Inverse DFT back to block positions.
        let mut z = vec![Complex64::new(0.0, 0.0); dim];
        for j in 0..q {
            for t in 0..self.d {
                scratch[t] = zhat[t * q + j];
            }
            let transformed = fft::ifft(&scratch);
            for k in 0..self.d {
                z[k * q + j] = transformed[k];
            }
        }
        LiftedVector::new(z, self.d, self.delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::masks;
    use crate::measure::{self, NoiseSpec, SnrTarget};
    use crate::rng::Rng;

    fn random_signal(d: usize, seed: u64) -> ComplexSignal {
        let mut rng = Rng::new(seed);
        ComplexSignal::random_normal(d, 1.0, &mut rng)
    }

    fn vec_y(grid: &MeasurementGrid) -> Vec<Complex64> {
        grid.values()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect()
    }

    #[test]
    fn rearranged_full_grid_matches_direct_ffp() {
        let (d, delta) = (15, 3);
        let (p, m) = masks::admissible_pair(d, delta).unwrap();
        let x = random_signal(d, 1);
        let idx = IndexSet::full_grid(d, delta).unwrap();
        let near = measure::forward_nfp(&x, &p, &m, &idx).unwrap();
        let rearranged = rearrange_near_to_far(&near).unwrap();
        let family = masks::derive_masks(&p, &m, 2 * delta - 1).unwrap();
        let far = measure::forward_ffp(&x, &family, d).unwrap();
        assert_eq!(rearranged.values().len(), 75);
        for k in 0..d {
            for l in 0..2 * delta - 1 {
                let diff = (rearranged.value(k, l) - far.value(k, l)).abs();
                assert!(diff < 1e-10, "k {k} l {l}: {diff}");
            }
        }
    }

    #[test]
    fn rearrangement_is_a_bijection() {
        let (d, delta) = (15, 3);
        let (p, m) = masks::admissible_pair(d, delta).unwrap();
        let x = random_signal(d, 2);
        let idx = IndexSet::full_grid(d, delta).unwrap();
        let near = measure::forward_nfp(&x, &p, &m, &idx).unwrap();
        let tilde = rearrange_near_to_far(&near).unwrap();
        // Invert the index map and recover the original grid exactly.
        let q = 2 * delta - 1;
        let mut recovered = vec![f64::NAN; d * q];
        for k in 0..d {
            for l in 0..q {
                let (src_k, src_l) = (imod(-(k as i64), d), imod(k as i64 - l as i64, q));
                recovered[src_k * q + src_l] = tilde.value(k, l);
            }
        }
        for (got, want) in recovered.iter().zip(near.values()) {
            assert_eq!(got, want);
        }
    }

    #[test]
    fn diagonal_band_rearrangement_is_relabeling() {
        let (d, k_count, l_count) = (20, 5, 7);
        let psf = masks::PsfSpec::new(random_signal(d, 3), None).unwrap();
        let m = masks::random_mask(d, 4);
        let idx = IndexSet::diagonal_band(d, k_count, l_count).unwrap();
        let near = measure::forward_nfp(&x_for(d), &psf, &m, &idx).unwrap();
        let tilde = rearrange_near_to_far(&near).unwrap();
        assert_eq!(tilde.values(), near.values());
        // and it matches the direct far-field simulation without periodicity
        let family = masks::derive_masks(&psf, &m, l_count).unwrap();
        let far = measure::forward_ffp(&x_for(d), &family, k_count).unwrap();
        for k in 0..k_count {
            for l in 0..l_count {
                let diff = (tilde.value(k, l) - far.value(k, l)).abs();
                assert!(diff < 1e-10 * (1.0 + far.value(k, l)), "k {k} l {l}");
            }
        }
    }

    fn x_for(d: usize) -> ComplexSignal {
        random_signal(d, 5)
    }

    #[test]
    fn single_entry_band_is_identity() {
        let d = 9;
        let psf = masks::PsfSpec::new(random_signal(d, 6), None).unwrap();
        let m = masks::random_mask(d, 7);
        let idx = IndexSet::diagonal_band(d, 1, 1).unwrap();
        let near = measure::forward_nfp(&x_for(d), &psf, &m, &idx).unwrap();
        let tilde = rearrange_near_to_far(&near).unwrap();
        assert_eq!(tilde.value(0, 0), near.value(0, 0));
    }

    #[test]
    fn rearranging_ffp_grid_is_config_error() {
        let d = 12;
        let (p, m) = masks::admissible_pair(d, 2).unwrap();
        let family = masks::derive_masks(&p, &m, 3).unwrap();
        let far = measure::forward_ffp(&x_for(d), &family, d).unwrap();
        assert!(matches!(rearrange_near_to_far(&far), Err(Error::Config(_))));
    }

    #[test]
    fn pack_slots_and_phase_invariance() {
        let x = random_signal(8, 8);
        let z = pack_lifted(&x, 3);
        for k in 0..8 {
            let diag = z.block_entry(k, 0);
            assert!((diag.re - x.get(k as i64).norm_sqr()).abs() < 1e-14);
            assert!(diag.im.abs() < 1e-14);
        }
        let rotated = pack_lifted(&x.scaled(crate::signal::unit_phase(1.234)), 3);
        for (a, b) in z.entries().iter().zip(rotated.entries()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn lifted_consistency_oracle() {
        // M * pack(x) equals the stacked far-field grid.
        for delta in [2usize, 3] {
            let d = 15;
            let (p, m) = masks::admissible_pair(d, delta).unwrap();
            let family = masks::derive_masks(&p, &m, 2 * delta - 1).unwrap();
            let op = LiftedOperator::assemble(&family, d, delta).unwrap();
            let x = random_signal(d, 100 + delta as u64);
            let z = pack_lifted(&x, delta);
            let applied = op.apply(z.entries()).unwrap();
            let far = measure::forward_ffp(&x, &family, d).unwrap();
            let y = vec_y(&far);
            let scale = y.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (a, b) in applied.iter().zip(&y) {
                assert!((a - b).norm() < 1e-12 * (1.0 + scale), "delta {delta}");
            }
        }
    }

    #[test]
    fn zero_masks_give_zero_operator() {
        let family = masks::DerivedMaskFamily::new(vec![ComplexSignal::zeros(15); 5]);
        let op = LiftedOperator::assemble(&family, 15, 3).unwrap();
        for s in 0..3 {
            assert_eq!(op.block(s).max_abs(), 0.0);
        }
    }

    #[test]
    fn delta_one_collapses_to_diagonal() {
        let d = 6;
        let (p, m) = masks::admissible_pair(d, 1).unwrap();
        let family = masks::derive_masks(&p, &m, 1).unwrap();
        let op = LiftedOperator::assemble(&family, d, 1).unwrap();
        assert_eq!(op.block(0).nrows(), 1);
        let want = family.mask(0).get(0).norm_sqr();
        assert!((op.block(0).get(0, 0).re - want).abs() < 1e-15);
        assert!(op.block(0).get(0, 0).im.abs() < 1e-15);
    }

    #[test]
    fn assembly_rejects_bad_inputs() {
        let d = 15;
        let (p, m) = masks::admissible_pair(d, 3).unwrap();
        let family = masks::derive_masks(&p, &m, 5).unwrap();
        assert!(LiftedOperator::assemble(&family, 16, 3).is_err()); // wrong length
        let global = masks::DerivedMaskFamily::new(vec![random_signal(d, 1); 5]);
        assert!(matches!(
            LiftedOperator::assemble(&global, d, 3),
            Err(Error::Config(_))
        )); // support violation
        let short = masks::DerivedMaskFamily::new(vec![family.mask(0).clone(); 4]);
        assert!(LiftedOperator::assemble(&short, d, 3).is_err()); // family size
    }

    #[test]
    fn unpack_is_left_inverse_of_pack() {
        let x = random_signal(8, 9);
        let z = pack_lifted(&x, 3);
        let xhat = crate::angsync::BandedAutocorrelation::from_vector(&z);
        let truth = crate::angsync::BandedAutocorrelation::from_signal(&x, 3);
        for i in 0..8 {
            for j in 0..8 {
                let diff = (xhat.matrix().get(i, j) - truth.matrix().get(i, j)).norm();
                assert!(diff < 1e-13);
            }
        }
    }

    #[test]
    fn solve_round_trip() {
        let (d, delta) = (15, 3);
        let (p, m) = masks::admissible_pair(d, delta).unwrap();
        let family = masks::derive_masks(&p, &m, 2 * delta - 1).unwrap();
        let op = LiftedOperator::assemble(&family, d, delta).unwrap();
        let mut rng = Rng::new(11);
        let z_true: Vec<Complex64> = (0..op.dim()).map(|_| rng.complex_normal(1.0)).collect();
        let y = op.apply(&z_true).unwrap();
        let z = op.solve(&y).unwrap();
        let err: f64 = z
            .entries()
            .iter()
            .zip(&z_true)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale: f64 = z_true.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-8 * scale, "relative err {}", err / scale);
    }

    #[test]
    fn fft_solve_matches_dense_solve() {
        let (d, delta) = (15, 3);
        let (p, m) = masks::admissible_pair(d, delta).unwrap();
        let family = masks::derive_masks(&p, &m, 2 * delta - 1).unwrap();
        let op = LiftedOperator::assemble(&family, d, delta).unwrap();
        let x = random_signal(d, 12);
        let far = measure::forward_ffp(&x, &family, d).unwrap();
        let y = vec_y(&far);
        let fast = op.solve(&y).unwrap();
        let dense = op.solve_dense(&y).unwrap();
        let scale: f64 = fast
            .entries()
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt();
        for (a, b) in fast.entries().iter().zip(dense.entries()) {
            assert!((a - b).norm() < 1e-8 * (1.0 + scale));
        }
    }

    #[test]
    fn identity_blocks_solve_is_identity() {
        let delta = 2;
        let q = 2 * delta - 1;
        let d = 9;
        let blocks = vec![CMat::identity(q), CMat::zeros(q, q)];
        let op = LiftedOperator { blocks, d, delta };
        let mut rng = Rng::new(13);
        let y: Vec<Complex64> = (0..d * q).map(|_| rng.complex_normal(1.0)).collect();
        let z = op.solve(&y).unwrap();
        for (a, b) in z.entries().iter().zip(&y) {
            assert!((a - b).norm() < 1e-12);
        }
        let report = op.conditioning();
        assert!((report.kappa - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditioning_of_reference_masks_obeys_bound() {
        for delta in [2usize, 3, 5, 8, 13] {
            let q = 2 * delta - 1;
            let d = 3 * q;
            let family = masks::DerivedMaskFamily::new(
                (0..q)
                    .map(|l| masks::fpr_mask(d, delta, l).unwrap())
                    .collect(),
            );
            let op = LiftedOperator::assemble(&family, d, delta).unwrap();
            let report = op.conditioning();
            assert!(
                report.kappa <= report.bound,
                "delta {delta}: kappa {} bound {}",
                report.kappa,
                report.bound
            );
        }
    }

    #[test]
    fn admissible_operator_is_row_permuted_reference_operator() {
        for delta in [2usize, 3, 5] {
            let q = 2 * delta - 1;
            let d = 3 * q;
            let (p, m) = masks::admissible_pair(d, delta).unwrap();
            let derived = masks::derive_masks(&p, &m, q).unwrap();
            let op_pm = LiftedOperator::assemble(&derived, d, delta).unwrap();
            let reference = masks::DerivedMaskFamily::new(
                (0..q)
                    .map(|l| masks::fpr_mask(d, delta, l).unwrap())
                    .collect(),
            );
            let op_ref = LiftedOperator::assemble(&reference, d, delta).unwrap();
            // blockwise: row i of the admissible block is row 2i mod q of the
            // reference block
            for s in 0..delta {
                for i in 0..q {
                    for j in 0..q {
                        let a = op_pm.block(s).get(i, j);
                        let b = op_ref.block(s).get((2 * i) % q, j);
                        assert!((a - b).norm() < 1e-12, "delta {delta} s {s} i {i} j {j}");
                    }
                }
            }
            // identical singular-value multisets
            let mut sig_a: Vec<f64> = op_pm
                .fourier_blocks()
                .iter()
                .flat_map(|b| svd_jacobi(b).sigma)
                .collect();
            let mut sig_b: Vec<f64> = op_ref
                .fourier_blocks()
                .iter()
                .flat_map(|b| svd_jacobi(b).sigma)
                .collect();
            sig_a.sort_by(|x, y| x.partial_cmp(y).unwrap());
            sig_b.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for (a, b) in sig_a.iter().zip(&sig_b) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn noiseless_end_to_end_lift_identity() {
        // Rearranged near-field data equals the operator applied to the
        // packed truth.
        for (d, delta) in [(15usize, 3usize), (45, 8), (105, 11)] {
            let (p, m) = masks::admissible_pair(d, delta).unwrap();
            let family = masks::derive_masks(&p, &m, 2 * delta - 1).unwrap();
            let op = LiftedOperator::assemble(&family, d, delta).unwrap();
            let x = random_signal(d, 200 + d as u64);
            let idx = IndexSet::full_grid(d, delta).unwrap();
            let near = measure::forward_nfp(&x, &p, &m, &idx).unwrap();
            let tilde = rearrange_near_to_far(&near).unwrap();
            let y = vec_y(&tilde);
            let predicted = op.apply(pack_lifted(&x, delta).entries()).unwrap();
            let scale = y.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (a, b) in predicted.iter().zip(&y) {
                assert!(
                    (a - b).norm() < 1e-9 * (1.0 + scale),
                    "(d, delta) = ({d}, {delta})"
                );
            }
        }
    }

    #[test]
    fn noisy_solve_recovers_packed_truth_approximately() {
        let (d, delta) = (15, 3);
        let (p, m) = masks::admissible_pair(d, delta).unwrap();
        let family = masks::derive_masks(&p, &m, 2 * delta - 1).unwrap();
        let op = LiftedOperator::assemble(&family, d, delta).unwrap();
        let x = random_signal(d, 21);
        let idx = IndexSet::full_grid(d, delta).unwrap();
        let near = measure::forward_nfp(&x, &p, &m, &idx).unwrap();
        let noisy = measure::add_noise(
            &near,
            &NoiseSpec {
                target: SnrTarget::Db(60.0),
                seed: 5,
            },
        )
        .unwrap();
        let tilde = rearrange_near_to_far(&noisy).unwrap();
        let z = op.solve(&vec_y(&tilde)).unwrap();
        let truth = pack_lifted(&x, delta);
        let err: f64 = z
            .entries()
            .iter()
            .zip(truth.entries())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale: f64 = truth
            .entries()
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err / scale < 1e-2, "relative err {}", err / scale);
    }
}
