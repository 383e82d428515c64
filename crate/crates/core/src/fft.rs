//! Complex FFT for arbitrary lengths: radix-2 for powers of two, Bluestein's
//! chirp-z reduction otherwise.
//!
//! Conventions match the rest of the crate: the forward transform is
//! `X_n = sum_k x_k exp(-2*pi*i*n*k/N)` and the inverse carries the `1/N`.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Forward DFT of any length (length 0 returns an empty vector).
pub fn fft(input: &[Complex64]) -> Vec<Complex64> {
    let n = input.len();
    if n <= 1 {
        return input.to_vec();
    }
    if n.is_power_of_two() {
        let mut buf = input.to_vec();
        fft_pow2(&mut buf, false);
        buf
    } else {
        bluestein(input)
    }
}

/// Inverse DFT (with the `1/N` normalization) of any length.
pub fn ifft(input: &[Complex64]) -> Vec<Complex64> {
    let n = input.len();
    if n <= 1 {
        return input.to_vec();
    }
    // conj-trick: ifft(x) = conj(fft(conj(x))) / N
    let conj_in: Vec<Complex64> = input.iter().map(|z| z.conj()).collect();
    let mut out = fft(&conj_in);
    let scale = 1.0 / n as f64;
    for z in &mut out {
        *z = z.conj() * scale;
    }
    out
}

/// In-place radix-2 decimation-in-time FFT. `n` must be a power of two.
fn fft_pow2(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    let log2n = n.trailing_zeros();

    for i in 0..n {
        let j = (i.reverse_bits()) >> (usize::BITS - log2n);
        if i < j {
            buf.swap(i, j);
        }
    }

    let sign = if inverse { 1.0 } else { -1.0 };
    let mut half = 1;
    while half < n {
        let step = sign * PI / half as f64;
        for start in (0..n).step_by(2 * half) {
            for j in 0..half {
                // Twiddles from exact angles; incremental rotation drifts.
                let w = Complex64::from_polar(1.0, step * j as f64);
                let u = buf[start + j];
                let t = w * buf[start + j + half];
                buf[start + j] = u + t;
                buf[start + j + half] = u - t;
            }
        }
        half *= 2;
    }

    if inverse {
        let scale = 1.0 / n as f64;
        for z in buf.iter_mut() {
            *z *= scale;
        }
    }
}

/// Bluestein's algorithm: length-N DFT as a length-M circular convolution
/// with a quadratic chirp, M a power of two at least 2N-1.
fn bluestein(input: &[Complex64]) -> Vec<Complex64> {
    let n = input.len();
    let m = (2 * n - 1).next_power_of_two();

    // chirp_k = exp(-i*pi*k^2/N); k^2 reduced mod 2N keeps angles exact.
    let chirp: Vec<Complex64> = (0..n)
        .map(|k| {
            let k2 = ((k as u128 * k as u128) % (2 * n as u128)) as f64;
            Complex64::from_polar(1.0, -PI * k2 / n as f64)
        })
        .collect();

    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        a[k] = input[k] * chirp[k];
    }

    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        b[k] = chirp[k].conj();
        b[m - k] = chirp[k].conj();
    }

    fft_pow2(&mut a, false);
    fft_pow2(&mut b, false);
    for (ai, bi) in a.iter_mut().zip(b.iter()) {
        *ai *= bi;
    }
    fft_pow2(&mut a, true);

    (0..n).map(|k| chirp[k] * a[k]).collect()
}
