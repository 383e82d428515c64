//! From banded autocorrelation estimates back to a signal estimate:
//! Hermitian symmetrization, magnitude read-off from the diagonal, phase
//! recovery by leading-eigenvector or weighted-Laplacian angular
//! synchronization, and spectral-graph diagnostics for the synchronization
//! stability.

use crate::error::{Error, Result};
use crate::lift::{slot_offset, LiftedVector};
use crate::linalg::{hermitian_eigen, power_iteration, seeded_start, smallest_eigenpair, CMat};
use crate::signal::{imod, ComplexSignal};
use num_complex::Complex64;

/// Entries of the leading eigenvector below this magnitude get phase 1.
const PHASE_FILL_TOL: f64 = 1e-14;

/// Eigen-iteration tolerance and cap for both synchronization routines.
const SYNC_TOL: f64 = 1e-10;
const SYNC_MAX_ITERS: usize = 10_000;

/// Fixed start seed for the deterministic eigen-iterations.
const SYNC_START_SEED: u64 = 0x5941_4e43;

// ---------------------------------------------------------------------------
// Banded autocorrelation
// ---------------------------------------------------------------------------

/// A `d x d` complex matrix supported on the circular band
/// `min((i-j) mod d, (j-i) mod d) < delta`, holding (estimates of) the
/// rank-one products `x_i conj(x_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedAutocorrelation {
    d: usize,
    delta: usize,
    mat: CMat,
}

impl BandedAutocorrelation {
    /// Circular band membership for offset `delta`.
    pub fn on_band(d: usize, delta: usize, i: usize, j: usize) -> bool {
        let fwd = imod(i as i64 - j as i64, d);
        let bwd = imod(j as i64 - i as i64, d);
        fwd.min(bwd) < delta
    }

    /// Exact banded products of a known signal.
    pub fn from_signal(x: &ComplexSignal, delta: usize) -> Self {
        let d = x.len();
        let mat = CMat::from_fn(d, d, |i, j| {
            if Self::on_band(d, delta, i, j) {
                x.get(i as i64) * x.get(j as i64).conj()
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        BandedAutocorrelation { d, delta, mat }
    }

    /// Unpack a lifted vector: block `k`, slot `j` lands at row `k`, column
    /// `(k + off(j)) mod d`; everything off the band stays zero.
    pub fn from_vector(z: &LiftedVector) -> Self {
        let d = z.d();
        let delta = z.delta();
        let q = 2 * delta - 1;
        let mut mat = CMat::zeros(d, d);
        for k in 0..d {
            for j in 0..q {
                let col = imod(k as i64 + slot_offset(j, delta), d);
                mat.set(k, col, z.block_entry(k, j));
            }
        }
        BandedAutocorrelation { d, delta, mat }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    /// Hermitian part `(X + X^*)/2`, restricted to the band.
    pub fn symmetrized(&self) -> Self {
        let mat = CMat::from_fn(self.d, self.d, |i, j| {
            if Self::on_band(self.d, self.delta, i, j) {
                (self.mat.get(i, j) + self.mat.get(j, i).conj()) * 0.5
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        BandedAutocorrelation {
            d: self.d,
            delta: self.delta,
            mat,
        }
    }

    /// Magnitude estimates `sqrt(max(Re X_jj, 0))`; noisy diagonals can dip
    /// negative and clamp to zero.
    pub fn magnitude_estimates(&self) -> Vec<f64> {
        (0..self.d)
            .map(|j| self.mat.get(j, j).re.max(0.0).sqrt())
            .collect()
    }

    /// Entrywise phase matrix: entries normalized to unit modulus, zero where
    /// the entry vanishes.
    pub fn phase_matrix(&self) -> CMat {
        CMat::from_fn(self.d, self.d, |i, j| {
            let v = self.mat.get(i, j);
            let r = v.norm();
            if r == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                v / r
            }
        })
    }
}

// ---------------------------------------------------------------------------
// Synchronization graph and spectral diagnostics
// ---------------------------------------------------------------------------

/// Weighted graph on the band offsets with weights `|X_ij|^2`, its
/// Laplacians, and spectral-gap diagnostics.
#[derive(Clone, Debug)]
pub struct SyncGraph {
    n: usize,
    /// Band half-width when the graph came from a banded autocorrelation.
    delta: Option<usize>,
    weights: Vec<f64>, // row-major n x n, symmetric, zero diagonal
}

/// The two theoretical lower bounds on the spectral gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapBounds {
    /// Band-graph bound `(|x|_min^4 / ||x||_inf^2) * 4 (delta - 1) / d^2`.
    pub band: f64,
    /// General weighted-graph bound
    /// `2 W_min^2 / (W_max (n - 1) diam(G_unw))`.
    pub general: f64,
}

impl SyncGraph {
    /// Weights `|X_ij|^2` on band edges (diagonal excluded).
    pub fn from_autocorrelation(xhat: &BandedAutocorrelation) -> Self {
        let n = xhat.d();
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j && BandedAutocorrelation::on_band(n, xhat.delta(), i, j) {
                    // symmetric average; equals |X_ij|^2 for Hermitian input
                    let w = 0.5
                        * (xhat.matrix().get(i, j).norm_sqr() + xhat.matrix().get(j, i).norm_sqr());
                    weights[i * n + j] = w;
                }
            }
        }
        SyncGraph {
            n,
            delta: Some(xhat.delta()),
            weights,
        }
    }

    /// General symmetric nonnegative weight matrix (zero diagonal).
    pub fn from_weights(n: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != n * n {
            return Err(Error::Dimension {
                what: "weight matrix",
                expected: n * n,
                got: weights.len(),
            });
        }
        for i in 0..n {
            if weights[i * n + i] != 0.0 {
                return Err(Error::Config("weight matrix must have zero diagonal"));
            }
            for j in 0..n {
                let w = weights[i * n + j];
                if w < 0.0 || (w - weights[j * n + i]).abs() > 1e-12 * (1.0 + w.abs()) {
                    return Err(Error::Config("weights must be symmetric and nonnegative"));
                }
            }
        }
        Ok(SyncGraph {
            n,
            delta: None,
            weights,
        })
    }

    /// Unweighted complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut weights = vec![1.0; n * n];
        for i in 0..n {
            weights[i * n + i] = 0.0;
        }
        SyncGraph {
            n,
            delta: None,
            weights,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    /// Weighted vertex degrees.
    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.weight(i, j)).sum())
            .collect()
    }

    /// Unnormalized Laplacian `L = D - W` (real symmetric).
    pub fn laplacian(&self) -> CMat {
        let deg = self.degrees();
        CMat::from_fn(self.n, self.n, |i, j| {
            if i == j {
                Complex64::new(deg[i], 0.0)
            } else {
                Complex64::new(-self.weight(i, j), 0.0)
            }
        })
    }

    /// Normalized Laplacian `D^{-1/2} L D^{-1/2}`; requires all degrees
    /// positive.
    pub fn normalized_laplacian(&self) -> Result<CMat> {
        let deg = self.degrees();
        if deg.iter().any(|&dv| dv <= 0.0) {
            return Err(Error::DegenerateInput(
                "normalized Laplacian needs strictly positive degrees",
            ));
        }
        let inv_sqrt: Vec<f64> = deg.iter().map(|dv| 1.0 / dv.sqrt()).collect();
        let lap = self.laplacian();
        Ok(CMat::from_fn(self.n, self.n, |i, j| {
            lap.get(i, j) * (inv_sqrt[i] * inv_sqrt[j])
        }))
    }

    /// Connectivity over edges of nonzero weight.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for u in 0..self.n {
                if !seen[u] && self.weight(v, u) > 0.0 {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.n
    }

    /// Second-smallest eigenvalue of the unnormalized Laplacian (dense
    /// symmetric eigensolve; desk scale).
    pub fn spectral_gap(&self) -> f64 {
        let (vals, _) = hermitian_eigen(&self.laplacian());
        vals[1]
    }

    /// Hop-count diameter of the unweighted support graph (`None` when
    /// disconnected).
    pub fn unweighted_diameter(&self) -> Option<usize> {
        let mut diameter = 0usize;
        for start in 0..self.n {
            let mut dist = vec![usize::MAX; self.n];
            let mut queue = std::collections::VecDeque::new();
            dist[start] = 0;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for u in 0..self.n {
                    if self.weight(v, u) > 0.0 && dist[u] == usize::MAX {
                        dist[u] = dist[v] + 1;
                        queue.push_back(u);
                    }
                }
            }
            let far = *dist.iter().max().unwrap();
            if far == usize::MAX {
                return None;
            }
            diameter = diameter.max(far);
        }
        Some(diameter)
    }

    /// Diameter in the inverse weights `1/W_ij` (all-pairs shortest paths;
    /// `None` when disconnected).
    pub fn inverse_weighted_diameter(&self) -> Option<f64> {
        let n = self.n;
        let mut dist = vec![f64::INFINITY; n * n];
        for i in 0..n {
            dist[i * n + i] = 0.0;
            for j in 0..n {
                let w = self.weight(i, j);
                if w > 0.0 {
                    dist[i * n + j] = 1.0 / w;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = dist[i * n + k] + dist[k * n + j];
                    if via < dist[i * n + j] {
                        dist[i * n + j] = via;
                    }
                }
            }
        }
        let max = dist.iter().cloned().fold(0.0, f64::max);
        if max.is_finite() {
            Some(max)
        } else {
            None
        }
    }

    /// Both theoretical lower bounds on the spectral gap, evaluated for a
    /// signal estimate whose products generated the weights.
    pub fn gap_lower_bounds(&self, x_est: &ComplexSignal) -> Result<GapBounds> {
        if !self.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        let delta = self
            .delta
            .ok_or(Error::Config("band bound needs a band-structured graph"))?;
        let d = self.n as f64;
        let x_min = x_est.min_abs();
        let x_inf = x_est.norm_inf();
        let band = if x_inf > 0.0 {
            (x_min.powi(4) / x_inf.powi(2)) * 4.0 * (delta as f64 - 1.0) / (d * d)
        } else {
            0.0
        };
        let mut w_min = f64::INFINITY;
        let mut w_max: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let w = self.weight(i, j);
                if w > 0.0 {
                    w_min = w_min.min(w);
                    w_max = w_max.max(w);
                }
            }
        }
        let diam = self.unweighted_diameter().ok_or(Error::DisconnectedGraph)? as f64;
        let general = if w_max > 0.0 && diam > 0.0 {
            2.0 * w_min * w_min / (w_max * (d - 1.0) * diam)
        } else {
            0.0
        };
        Ok(GapBounds { band, general })
    }
}

// ---------------------------------------------------------------------------
// Angular synchronization
// ---------------------------------------------------------------------------

fn normalized_phases(v: &[Complex64]) -> ComplexSignal {
    let entries: Vec<Complex64> = v
        .iter()
        .map(|z| {
            let r = z.norm();
            if r < PHASE_FILL_TOL {
                Complex64::new(1.0, 0.0)
            } else {
                z / r
            }
        })
        .collect();
    // Deterministic global-phase convention: first entry real positive.
    let anchor = entries[0];
    let rotation = anchor.conj() / anchor.norm();
    ComplexSignal::new(entries.into_iter().map(|z| z * rotation).collect())
}

/// Phase estimate from the leading eigenvector of the entrywise-normalized
/// autocorrelation.
pub fn sync_leading_eigenvector(xhat: &BandedAutocorrelation) -> Result<ComplexSignal> {
    let theta = xhat.phase_matrix();
    if theta.max_abs() == 0.0 {
        return Err(Error::DegenerateInput(
            "phase matrix is identically zero; nothing to synchronize",
        ));
    }
    let d = xhat.d();
    // Shift by the largest absolute row sum so the iteration targets the
    // algebraically largest eigenvalue even for indefinite phase matrices.
    let shift: f64 = (0..d)
        .map(|i| (0..d).map(|j| theta.get(i, j).norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let start = seeded_start(d, SYNC_START_SEED);
    let apply = |v: &[Complex64]| -> Vec<Complex64> {
        let mut w = theta.mul_vec(v);
        for (wi, vi) in w.iter_mut().zip(v) {
            *wi += vi * shift;
        }
        w
    };
    let (_, u) = power_iteration(
        apply,
        &start,
        SYNC_TOL,
        SYNC_MAX_ITERS,
        "leading-eigenvector synchronization",
    )?;
    Ok(normalized_phases(&u))
}

/// Phase estimate from the smallest eigenvector of the phase-weighted
/// Laplacian `L1 = D - W o X^(theta)` with weights `W_ij = |X_ij|^2`.
///
/// For a noiseless nonvanishing signal the true phase vector is an exact
/// null vector of `L1`, so the estimate matches the truth up to one global
/// rotation.
pub fn sync_weighted_laplacian(xhat: &BandedAutocorrelation) -> Result<ComplexSignal> {
    let graph = SyncGraph::from_autocorrelation(xhat);
    if !graph.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let d = xhat.d();
    let theta = xhat.phase_matrix();
    let degrees = graph.degrees();
    let l1 = CMat::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(degrees[i], 0.0)
        } else {
            -(theta.get(i, j) * graph.weight(i, j))
        }
    });
    let (_, v) = smallest_eigenpair(&l1, SYNC_TOL, SYNC_MAX_ITERS, SYNC_START_SEED)?;
    Ok(normalized_phases(&v))
}

/// Combine unit-modulus phases with nonnegative magnitudes into a signal
/// estimate.
pub fn assemble_estimate(phases: &ComplexSignal, magnitudes: &[f64]) -> Result<ComplexSignal> {
    if phases.len() != magnitudes.len() {
        return Err(Error::Dimension {
            what: "estimate assembly",
            expected: phases.len(),
            got: magnitudes.len(),
        });
    }
    Ok(ComplexSignal::from_fn(phases.len(), |n| {
        phases.get(n as i64) * magnitudes[n]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics;
    use crate::rng::Rng;
    use crate::signal::unit_phase;

    fn random_signal(d: usize, seed: u64) -> ComplexSignal {
        let mut rng = Rng::new(seed);
        ComplexSignal::random_normal(d, 1.0, &mut rng)
    }

    #[test]
    fn symmetrize_fixes_hermitian_violations() {
        let x = random_signal(8, 1);
        let truth = BandedAutocorrelation::from_signal(&x, 3);
        // Hermitian input is a fixed point.
        let sym = truth.symmetrized();
        for i in 0..8 {
            for j in 0..8 {
                assert!((sym.matrix().get(i, j) - truth.matrix().get(i, j)).norm() < 1e-12);
            }
        }
        // A single off-diagonal perturbation becomes Hermitian.
        let z = crate::lift::pack_lifted(&x, 3);
        let mut bumped = BandedAutocorrelation::from_vector(&z);
        bumped
            .mat
            .set(0, 1, bumped.mat.get(0, 1) + Complex64::new(0.0, 1.0));
        let fixed = bumped.symmetrized();
        assert!(fixed.matrix().is_hermitian(1e-12));
    }

    #[test]
    fn magnitude_estimates_with_clamping() {
        let x = random_signal(10, 2);
        let auto = BandedAutocorrelation::from_signal(&x, 2);
        let mags = auto.magnitude_estimates();
        for (m, z) in mags.iter().zip(x.iter()) {
            assert!((m - z.norm()).abs() < 1e-12);
        }
        let mut damaged = auto.clone();
        damaged.mat.set(0, 0, Complex64::new(-0.1, 0.0));
        assert_eq!(damaged.magnitude_estimates()[0], 0.0);
        // homogeneity: scaling the matrix scales magnitudes by sqrt(c)
        let scaled = BandedAutocorrelation {
            d: auto.d,
            delta: auto.delta,
            mat: auto.mat.scaled(Complex64::new(4.0, 0.0)),
        };
        for (a, b) in scaled.magnitude_estimates().iter().zip(&mags) {
            assert!((a - 2.0 * b).abs() < 1e-12);
        }
    }

    #[test]
    fn leading_eigenvector_recovers_phases_small_case() {
        // Four entries, band 2, noiseless: phases match up to global phase.
        let x = ComplexSignal::new(vec![
            unit_phase(0.3) * 1.5,
            unit_phase(-1.2) * 0.7,
            unit_phase(2.4) * 1.1,
            unit_phase(0.9) * 0.4,
        ]);
        let auto = BandedAutocorrelation::from_signal(&x, 2);
        let phases = sync_leading_eigenvector(&auto).unwrap();
        let want = x.phases();
        let err = metrics::relative_recovery_error(&want, &phases).unwrap();
        assert!(err < 1e-8, "err {err}");
    }

    #[test]
    fn leading_eigenvector_on_positive_signal() {
        let x = ComplexSignal::new(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(0.9, 0.0),
            Complex64::new(1.4, 0.0),
        ]);
        let auto = BandedAutocorrelation::from_signal(&x, 2);
        let phases = sync_leading_eigenvector(&auto).unwrap();
        for z in phases.iter() {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn rotated_signal_gives_identical_autocorrelation_and_output() {
        let x = random_signal(12, 3);
        let rotated = x.scaled(unit_phase(0.777));
        let a = BandedAutocorrelation::from_signal(&x, 3);
        let b = BandedAutocorrelation::from_signal(&rotated, 3);
        for i in 0..12 {
            for j in 0..12 {
                assert!((a.matrix().get(i, j) - b.matrix().get(i, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn weighted_laplacian_sync_noiseless_exact() {
        let (d, delta) = (15, 3);
        let x = random_signal(d, 4);
        let auto = BandedAutocorrelation::from_signal(&x, delta);
        let phases = sync_weighted_laplacian(&auto).unwrap();
        let want = x.phases();
        let dist = metrics::min_phase_distance(&want, &phases).unwrap();
        // entrywise deviation below 1e-8 after optimal rotation
        assert!(dist < 1e-8 * (d as f64).sqrt(), "dist {dist}");
    }

    #[test]
    fn weighted_laplacian_constant_phase_case() {
        let x = ComplexSignal::new(vec![Complex64::new(2.0, 0.0); 9]);
        let auto = BandedAutocorrelation::from_signal(&x, 2);
        let phases = sync_weighted_laplacian(&auto).unwrap();
        for z in phases.iter() {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn weighted_laplacian_scale_invariant() {
        let x = random_signal(12, 5);
        let auto = BandedAutocorrelation::from_signal(&x, 3);
        let scaled = BandedAutocorrelation {
            d: auto.d,
            delta: auto.delta,
            mat: auto.mat.scaled(Complex64::new(7.5, 0.0)),
        };
        let a = sync_weighted_laplacian(&auto).unwrap();
        let b = sync_weighted_laplacian(&scaled).unwrap();
        let dist = metrics::min_phase_distance(&a, &b).unwrap();
        assert!(dist < 1e-8);
    }

    #[test]
    fn disconnected_graph_is_an_error() {
        // delta = 1: no off-diagonal band, graph has no edges.
        let x = random_signal(6, 6);
        let auto = BandedAutocorrelation::from_signal(&x, 1);
        assert!(matches!(
            sync_weighted_laplacian(&auto),
            Err(Error::DisconnectedGraph)
        ));
        // a vanishing entry cuts all its edges
        let mut entries: Vec<Complex64> = random_signal(8, 7).entries().to_vec();
        entries[3] = Complex64::new(0.0, 0.0);
        let auto = BandedAutocorrelation::from_signal(&ComplexSignal::new(entries), 2);
        assert!(matches!(
            sync_weighted_laplacian(&auto),
            Err(Error::DisconnectedGraph)
        ));
    }

    #[test]
    fn spectral_gap_of_complete_graph_is_n() {
        for n in 3..=10 {
            let g = SyncGraph::complete(n);
            assert!((g.spectral_gap() - n as f64).abs() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn spectral_gap_of_disconnected_graph_is_zero() {
        // two isolated edges
        let n = 4;
        let mut w = vec![0.0; n * n];
        w[1] = 1.0;
        w[n] = 1.0;
        w[2 * n + 3] = 1.0;
        w[3 * n + 2] = 1.0;
        let g = SyncGraph::from_weights(n, w).unwrap();
        assert!(g.spectral_gap().abs() < 1e-10);
        assert!(!g.is_connected());
    }

    #[test]
    fn spectral_gap_of_weighted_edge() {
        let w_val = 3.7;
        let g = SyncGraph::from_weights(2, vec![0.0, w_val, w_val, 0.0]).unwrap();
        assert!((g.spectral_gap() - 2.0 * w_val).abs() < 1e-10);
    }

    #[test]
    fn laplacians_are_positive_semidefinite() {
        for seed in 0..20 {
            let x = random_signal(12, 100 + seed);
            let auto = BandedAutocorrelation::from_signal(&x, 3);
            let g = SyncGraph::from_autocorrelation(&auto);
            let (vals, _) = hermitian_eigen(&g.laplacian());
            assert!(vals[0] > -1e-10);
            let (nvals, _) = hermitian_eigen(&g.normalized_laplacian().unwrap());
            assert!(nvals[0] > -1e-10);
        }
    }

    #[test]
    fn gap_exceeds_both_lower_bounds() {
        let dims = [(8usize, 2usize), (12, 3), (15, 3), (16, 4), (21, 4)];
        for seed in 0..100u64 {
            let (d, delta) = dims[(seed % 5) as usize];
            let x = random_signal(d, 300 + seed);
            let auto = BandedAutocorrelation::from_signal(&x, delta);
            let g = SyncGraph::from_autocorrelation(&auto);
            let gap = g.spectral_gap();
            let bounds = g.gap_lower_bounds(&x).unwrap();
            assert!(
                gap >= bounds.band - 1e-12,
                "band bound violated at seed {seed}"
            );
            assert!(
                gap >= bounds.general - 1e-12,
                "general bound violated at seed {seed}"
            );
        }
    }

    #[test]
    fn complete_graph_general_bound() {
        // all weights 1: bound = 2/(n-1) <= tau = n
        let n = 7;
        let g = SyncGraph::complete(n);
        let diam = g.unweighted_diameter().unwrap();
        assert_eq!(diam, 1);
        let w_min = 1.0;
        let w_max = 1.0;
        let bound = 2.0 * w_min * w_min / (w_max * (n as f64 - 1.0) * diam as f64);
        assert!((bound - 2.0 / 6.0).abs() < 1e-15);
        assert!(g.spectral_gap() >= bound);
    }

    #[test]
    fn band_graph_diameter_formula() {
        for (d, delta) in [(15usize, 3usize), (12, 2), (21, 4), (16, 5)] {
            let x = ComplexSignal::ones(d);
            let auto = BandedAutocorrelation::from_signal(&x, delta);
            let g = SyncGraph::from_autocorrelation(&auto);
            let bfs = g.unweighted_diameter().unwrap();
            let bound = ((d as f64 / 2.0) / (delta as f64 - 1.0)).ceil() as usize;
            assert!(bfs <= bound, "(d, delta) = ({d}, {delta}): {bfs} > {bound}");
        }
    }

    #[test]
    fn inverse_weighted_diameter_consistency() {
        for seed in 0..20 {
            let x = random_signal(10, 700 + seed);
            let auto = BandedAutocorrelation::from_signal(&x, 3);
            let g = SyncGraph::from_autocorrelation(&auto);
            let inv_diam = g.inverse_weighted_diameter().unwrap();
            let mut w_min = f64::INFINITY;
            for i in 0..10 {
                for j in 0..10 {
                    let w = g.weight(i, j);
                    if w > 0.0 {
                        w_min = w_min.min(w);
                    }
                }
            }
            let unw = g.unweighted_diameter().unwrap() as f64;
            assert!(inv_diam <= unw / w_min + 1e-12);
        }
    }

    #[test]
    fn estimate_assembly() {
        let x = random_signal(10, 8);
        let est = assemble_estimate(&x.phases(), &x.magnitudes()).unwrap();
        let err = metrics::relative_recovery_error(&x, &est).unwrap();
        assert!(err < 1e-14);
        let zeros = assemble_estimate(&x.phases(), &vec![0.0; 10]).unwrap();
        assert_eq!(zeros.norm(), 0.0);
        // norm of the estimate equals the norm of the magnitudes
        let norm_mags = x.magnitudes().iter().map(|m| m * m).sum::<f64>().sqrt();
        assert!((est.norm() - norm_mags).abs() < 1e-12);
        assert!(assemble_estimate(&x.phases(), &vec![1.0; 9]).is_err());
    }

    #[test]
    fn phase_magnitude_error_decomposition() {
        // total error <= ||x||_inf * phase error + magnitude error
        for seed in 0..100u64 {
            let d = 12;
            let x = random_signal(d, 900 + seed);
            let est = random_signal(d, 1900 + seed);
            let lhs = metrics::min_phase_distance(&x, &est).unwrap();
            let phase_err = metrics::min_phase_distance(&x.phases(), &est.phases()).unwrap();
            let mag_err: f64 = x
                .magnitudes()
                .iter()
                .zip(est.magnitudes())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let rhs = x.norm_inf() * phase_err + mag_err;
            assert!(lhs <= rhs + 1e-9, "seed {seed}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn noiseless_reconstruction_from_packed_products() {
        for (d, delta) in [(15usize, 3usize), (45, 8)] {
            let x = random_signal(d, 50 + d as u64);
            let z = crate::lift::pack_lifted(&x, delta);
            let auto = BandedAutocorrelation::from_vector(&z).symmetrized();
            let mags = auto.magnitude_estimates();
            let phases = sync_weighted_laplacian(&auto).unwrap();
            let est = assemble_estimate(&phases, &mags).unwrap();
            let err = metrics::relative_recovery_error(&x, &est).unwrap();
            assert!(err < 1e-7, "(d, delta) = ({d}, {delta}): {err}");
        }
    }
}
