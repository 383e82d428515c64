//! Dense complex linear algebra at desk scale: row-major matrices, LU with
//! partial pivoting, one-sided Jacobi SVD, a Hermitian Jacobi eigensolver,
//! and power/inverse iteration.
//!
//! Everything here targets the matrix sizes this crate actually meets
//! (blocks of a few dozen rows, synchronization matrices up to a few
//! thousand); no blocking or cache tuning.

use crate::error::{Error, Result};
use crate::rng::Rng;
use num_complex::Complex64;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    nrows: usize,
    ncols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CMat {
            nrows,
            ncols,
            data: vec![Complex64::new(0.0, 0.0); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(
        nrows: usize,
        ncols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                data.push(f(i, j));
            }
        }
        CMat { nrows, ncols, data }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.ncols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.ncols, self.nrows, |i, j| self.get(j, i).conj())
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.ncols);
        (0..self.nrows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn matmul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.ncols, rhs.nrows);
        let mut out = CMat::zeros(self.nrows, rhs.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.ncols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn scaled(&self, c: Complex64) -> CMat {
        CMat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        CMat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        for i in 0..self.nrows {
            for j in i..self.ncols {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// LU with partial pivoting
// ---------------------------------------------------------------------------

/// LU factors of a square matrix, reusable across right-hand sides.
pub struct LuFactors {
    lu: CMat,
    pivots: Vec<usize>,
}

pub fn lu_factor(a: &CMat) -> Result<LuFactors> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Dimension {
            what: "LU factorization (square matrix required)",
            expected: n,
            got: a.ncols(),
        });
    }
    let mut lu = a.clone();
    let mut pivots = vec![0usize; n];
    for k in 0..n {
        let mut p = k;
        let mut best = lu.get(k, k).norm();
        for i in k + 1..n {
            let v = lu.get(i, k).norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return Err(Error::IllPosedOperator {
                block: k,
                sigma_min: 0.0,
            });
        }
        pivots[k] = p;
        if p != k {
            for j in 0..n {
                let tmp = lu.get(k, j);
                lu.set(k, j, lu.get(p, j));
                lu.set(p, j, tmp);
            }
        }
        let inv_piv = Complex64::new(1.0, 0.0) / lu.get(k, k);
        for i in k + 1..n {
            let factor = lu.get(i, k) * inv_piv;
            lu.set(i, k, factor);
            if factor != Complex64::new(0.0, 0.0) {
                for j in k + 1..n {
                    let v = lu.get(i, j) - factor * lu.get(k, j);
                    lu.set(i, j, v);
                }
            }
        }
    }
    Ok(LuFactors { lu, pivots })
}

impl LuFactors {
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.nrows();
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
        }
        // forward: L y = Pb (unit diagonal)
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu.get(i, j) * x[j];
            }
            x[i] = s;
        }
        // backward: U x = y
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu.get(i, j) * x[j];
            }
            x[i] = s / self.lu.get(i, i);
        }
        x
    }
}

/// One-shot LU solve.
pub fn lu_solve(a: &CMat, b: &[Complex64]) -> Result<Vec<Complex64>> {
    Ok(lu_factor(a)?.solve(b))
}

// ---------------------------------------------------------------------------
// One-sided Jacobi SVD
// ---------------------------------------------------------------------------

/// Thin SVD `A = U diag(sigma) V^*` with singular values descending.
pub struct Svd {
    pub u: CMat,
    pub sigma: Vec<f64>,
    pub v: CMat,
}

/// One-sided Jacobi SVD for m >= n. Columns of `a` are orthogonalized by
/// unitary plane rotations accumulated into V.
pub fn svd_jacobi(a: &CMat) -> Svd {
    let m = a.nrows();
    let n = a.ncols();
    assert!(m >= n, "one-sided Jacobi expects m >= n");
    let mut w = a.clone();
    let mut v = CMat::identity(n);

    let tol = 1e-15;
    let max_sweeps = 40;
    for _ in 0..max_sweeps {
        let mut converged = true;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    let aip = w.get(i, p);
                    let aiq = w.get(i, q);
                    app += aip.norm_sqr();
                    aqq += aiq.norm_sqr();
                    apq += aip.conj() * aiq;
                }
                let off = apq.norm();
                if off <= tol * (app * aqq).sqrt() || off == 0.0 {
                    continue;
                }
                converged = false;
                // Unitary rotation J = diag(1, e^{-i phi}) * R(theta) chosen to
                // zero the Gram off-diagonal of columns (p, q).
                let phase = apq / off; // e^{i phi}
                let tau = (aqq - app) / (2.0 * off);
                let t = tau.signum_or_one() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let e = phase.conj(); // e^{-i phi}
                for i in 0..m {
                    let aip = w.get(i, p);
                    let aiq = w.get(i, q);
                    w.set(i, p, aip * c - aiq * (e * s));
                    w.set(i, q, aip * s + aiq * (e * c));
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * c - viq * (e * s));
                    v.set(i, q, vip * s + viq * (e * c));
                }
            }
        }
        if converged {
            break;
        }
    }

    // Column norms are the singular values; sort descending.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| w.get(i, j).norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());

    let mut u = CMat::zeros(m, n);
    let mut vv = CMat::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (new_j, &old_j) in order.iter().enumerate() {
        let s = norms[old_j];
        sigma.push(s);
        if s > 0.0 {
            for i in 0..m {
                u.set(i, new_j, w.get(i, old_j) / s);
            }
        }
        for i in 0..n {
            vv.set(i, new_j, v.get(i, old_j));
        }
    }
    Svd { u, sigma, v: vv }
}

impl Svd {
    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0)
    }

    /// Solve `A x = b` through the factorization (square, nonsingular A).
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let ub = self.u.adjoint().mul_vec(b);
        let scaled: Vec<Complex64> = ub.iter().zip(&self.sigma).map(|(z, &s)| z / s).collect();
        self.v.mul_vec(&scaled)
    }
}

trait SignumOrOne {
    fn signum_or_one(self) -> f64;
}

impl SignumOrOne for f64 {
    fn signum_or_one(self) -> f64 {
        if self >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (two-sided Jacobi)
// ---------------------------------------------------------------------------

/// Full eigendecomposition of a Hermitian matrix. Returns eigenvalues in
/// ascending order and the matching eigenvectors as columns.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "hermitian_eigen expects a square matrix");
    let mut w = a.clone();
    let mut q = CMat::identity(n);

    let norm = w.frobenius_norm().max(f64::MIN_POSITIVE);
    let tol = 1e-14 * norm;
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += w.get(i, j).norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= tol {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for qq in p + 1..n {
                let apq = w.get(p, qq);
                let offd = apq.norm();
                if offd <= 1e-300 {
                    continue;
                }
                let app = w.get(p, p).re;
                let aqq = w.get(qq, qq).re;
                let phase = apq / offd; // e^{i phi}
                let tau = (aqq - app) / (2.0 * offd);
                let t = tau.signum_or_one() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let e = phase.conj(); // e^{-i phi}

                // A <- J^* A J with J the (p, q) plane rotation.
                for i in 0..n {
                    let aip = w.get(i, p);
                    let aiq = w.get(i, qq);
                    w.set(i, p, aip * c - aiq * (e * s));
                    w.set(i, qq, aip * s + aiq * (e * c));
                }
                for j in 0..n {
                    let apj = w.get(p, j);
                    let aqj = w.get(qq, j);
                    w.set(p, j, apj * c - aqj * (e.conj() * s));
                    w.set(qq, j, apj * s + aqj * (e.conj() * c));
                }
                // Kill numerical drift off the real diagonal.
                let dpp = w.get(p, p).re;
                let dqq = w.get(qq, qq).re;
                w.set(p, p, Complex64::new(dpp, 0.0));
                w.set(qq, qq, Complex64::new(dqq, 0.0));

                for i in 0..n {
                    let qip = q.get(i, p);
                    let qiq = q.get(i, qq);
                    q.set(i, p, qip * c - qiq * (e * s));
                    q.set(i, qq, qip * s + qiq * (e * c));
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (w.get(i, i).re, i)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let eigenvalues: Vec<f64> = pairs.iter().map(|&(v, _)| v).collect();
    let mut vectors = CMat::zeros(n, n);
    for (new_j, &(_, old_j)) in pairs.iter().enumerate() {
        for i in 0..n {
            vectors.set(i, new_j, q.get(i, old_j));
        }
    }
    (eigenvalues, vectors)
}

// ---------------------------------------------------------------------------
// Iterative eigen-solvers
// ---------------------------------------------------------------------------

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let n = vec_norm(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
    n
}

/// Deterministic pseudorandom unit start vector for the iterative solvers.
pub fn seeded_start(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = Rng::new(seed);
    let mut v: Vec<Complex64> = (0..n).map(|_| rng.complex_normal(1.0)).collect();
    normalize(&mut v);
    v
}

/// Power iteration for the dominant eigenpair of a Hermitian operator given
/// as a closure. Residual tolerance is relative to the Rayleigh quotient.
pub fn power_iteration<F>(
    apply: F,
    start: &[Complex64],
    tol: f64,
    max_iters: usize,
    what: &'static str,
) -> Result<(f64, Vec<Complex64>)>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let mut v = start.to_vec();
    if normalize(&mut v) == 0.0 {
        return Err(Error::DegenerateInput("power iteration started at zero"));
    }
    let mut residual = f64::INFINITY;
    for _ in 0..max_iters {
        let w = apply(&v);
        let lambda = vec_inner(&w, &v).re;
        let mut r = 0.0;
        for i in 0..v.len() {
            r += (w[i] - v[i] * lambda).norm_sqr();
        }
        residual = r.sqrt();
        let scale = lambda.abs().max(vec_norm(&w)).max(f64::MIN_POSITIVE);
        if residual <= tol * scale {
            return Ok((lambda, v));
        }
        v = w;
        if normalize(&mut v) == 0.0 {
            return Err(Error::DegenerateInput("operator annihilated the iterate"));
        }
    }
    Err(Error::Convergence {
        what,
        iterations: max_iters,
        residual,
    })
}

/// Smallest eigenpair of a Hermitian positive semidefinite matrix by inverse
/// iteration on a slightly shifted copy, with a dense eigensolve fallback.
pub fn smallest_eigenpair(
    a: &CMat,
    tol: f64,
    max_iters: usize,
    seed: u64,
) -> Result<(f64, Vec<Complex64>)> {
    let n = a.nrows();
    let scale = (0..n)
        .map(|i| a.get(i, i).re.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let shift = 1e-12 * scale;
    let mut shifted = a.clone();
    for i in 0..n {
        let v = shifted.get(i, i) + Complex64::new(shift, 0.0);
        shifted.set(i, i, v);
    }
    let iterate = |factors: &LuFactors| -> Result<(f64, Vec<Complex64>)> {
        let mut v = seeded_start(n, seed);
        let mut residual = f64::INFINITY;
        for _ in 0..max_iters {
            let mut w = factors.solve(&v);
            if normalize(&mut w) == 0.0 {
                return Err(Error::DegenerateInput("inverse iteration collapsed"));
            }
            let aw = a.mul_vec(&w);
            let lambda = vec_inner(&aw, &w).re;
            let mut r = 0.0;
            for i in 0..n {
                r += (aw[i] - w[i] * lambda).norm_sqr();
            }
            residual = r.sqrt();
            if residual <= tol * scale {
                return Ok((lambda, w));
            }
            v = w;
        }
        Err(Error::Convergence {
            what: "inverse iteration for the smallest eigenpair",
            iterations: max_iters,
            residual,
        })
    };

    let by_iteration = lu_factor(&shifted).and_then(|f| iterate(&f));
    match by_iteration {
        Ok(pair) => Ok(pair),
        Err(_) => {
            // Desk-scale dense fallback.
            let (vals, vecs) = hermitian_eigen(a);
            let v: Vec<Complex64> = (0..n).map(|i| vecs.get(i, 0)).collect();
            Ok((vals[0], v))
        }
    }
}
