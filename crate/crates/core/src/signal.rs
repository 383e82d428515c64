//! Circularly indexed complex vectors and their algebra: shifts, reversal,
//! Hadamard products, circular convolution, DFT, and inner products.
//!
//! All index arithmetic is reduced with a mathematical (non-negative) modulo,
//! so negative and out-of-range indices are always valid. Values are
//! immutable after construction; every operation returns a fresh vector.

use crate::error::{Error, Result};
use crate::fft;
use crate::rng::Rng;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Length above which circular convolution dispatches to the FFT path.
const CONV_FFT_THRESHOLD: usize = 64;

/// A length-`d` complex vector with circular (mod `d`) indexing.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSignal {
    entries: Vec<Complex64>,
}

/// Reduce an integer index into `[0, d)` with a non-negative remainder.
#[inline]
pub fn imod(n: i64, d: usize) -> usize {
    n.rem_euclid(d as i64) as usize
}

impl ComplexSignal {
    pub fn new(entries: Vec<Complex64>) -> Self {
        assert!(!entries.is_empty(), "signals must have positive length");
        ComplexSignal { entries }
    }

    pub fn zeros(d: usize) -> Self {
        ComplexSignal::new(vec![Complex64::new(0.0, 0.0); d])
    }

    pub fn ones(d: usize) -> Self {
        ComplexSignal::new(vec![Complex64::new(1.0, 0.0); d])
    }

    /// Unit impulse at position `k mod d`.
    pub fn delta(d: usize, k: i64) -> Self {
        let mut s = ComplexSignal::zeros(d);
        s.entries[imod(k, d)] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn from_fn(d: usize, mut f: impl FnMut(usize) -> Complex64) -> Self {
        ComplexSignal::new((0..d).map(|n| f(n)).collect())
    }

    /// Entries with independent Gaussian real and imaginary parts of the
    /// given standard deviation each.
    pub fn random_normal(d: usize, sigma_per_part: f64, rng: &mut Rng) -> Self {
        ComplexSignal::from_fn(d, |_| rng.complex_normal(sigma_per_part))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Circularly indexed entry access.
    #[inline]
    pub fn get(&self, n: i64) -> Complex64 {
        self.entries[imod(n, self.len())]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex64> {
        self.entries.iter()
    }

    fn check_len(&self, other: &Self, what: &'static str) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::Dimension {
                what,
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(())
    }

    /// Circular shift: `result_n = x_{(n+k) mod d}`.
    pub fn shift(&self, k: i64) -> Self {
        let d = self.len();
        ComplexSignal::from_fn(d, |n| self.get(n as i64 + k))
    }

    /// Reversal about the first entry: `result_n = x_{(-n) mod d}`.
    pub fn reversed(&self) -> Self {
        let d = self.len();
        ComplexSignal::from_fn(d, |n| self.get(-(n as i64)))
    }

    pub fn conj(&self) -> Self {
        ComplexSignal::new(self.entries.iter().map(|z| z.conj()).collect())
    }

    /// Pointwise product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.check_len(other, "hadamard product")?;
        Ok(ComplexSignal::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a * b)
                .collect(),
        ))
    }

    /// Circular convolution `(x * y)_n = sum_k x_k y_{(n-k) mod d}`.
    ///
    /// Dispatches to the FFT path for long signals; both paths are public
    /// and agree to high precision.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_len(other, "circular convolution")?;
        if self.len() > CONV_FFT_THRESHOLD {
            self.convolve_fft(other)
        } else {
            self.convolve_direct(other)
        }
    }

    /// Quadratic-time convolution by the defining sum.
    pub fn convolve_direct(&self, other: &Self) -> Result<Self> {
        self.check_len(other, "circular convolution")?;
        let d = self.len();
        Ok(ComplexSignal::from_fn(d, |n| {
            (0..d)
                .map(|k| self.entries[k] * other.get(n as i64 - k as i64))
                .sum()
        }))
    }

    /// Convolution through the DFT (convolution theorem).
    pub fn convolve_fft(&self, other: &Self) -> Result<Self> {
        self.check_len(other, "circular convolution")?;
        let fx = fft::fft(&self.entries);
        let fy = fft::fft(&other.entries);
        let prod: Vec<Complex64> = fx.iter().zip(&fy).map(|(a, b)| a * b).collect();
        Ok(ComplexSignal::new(fft::ifft(&prod)))
    }

    /// Forward DFT: `result_n = sum_k x_k exp(-2 pi i n k / d)`.
    pub fn dft(&self) -> Self {
        ComplexSignal::new(fft::fft(&self.entries))
    }

    /// Inverse DFT (with the `1/d` factor).
    pub fn idft(&self) -> Self {
        ComplexSignal::new(fft::ifft(&self.entries))
    }

    /// Complex inner product `<x, y> = sum_n x_n conj(y_n)`, conjugate-linear
    /// in the second argument.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_len(other, "inner product")?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Smallest entry magnitude.
    pub fn min_abs(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        ComplexSignal::new(self.entries.iter().map(|z| z * c).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_len(other, "vector addition")?;
        Ok(ComplexSignal::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_len(other, "vector subtraction")?;
        Ok(ComplexSignal::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    /// Entry magnitudes as a real vector.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.entries.iter().map(|z| z.norm()).collect()
    }

    /// Entrywise phase factors `x_n / |x_n|`; entries with zero magnitude
    /// become 1 so the result is always unit-modulus.
    pub fn phases(&self) -> Self {
        ComplexSignal::new(
            self.entries
                .iter()
                .map(|z| {
                    let r = z.norm();
                    if r == 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        z / r
                    }
                })
                .collect(),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Unit phase factor `exp(i theta)`.
pub fn unit_phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// The `d`-th root-of-unity power `exp(2 pi i k / d)`.
pub fn root_of_unity(d: usize, k: i64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * imod(k, d) as f64 / d as f64)
}
