//! Simulation and recovery for one-dimensional near-field ptychography.
//!
//! The measured data are phaseless intensities of a point-spread-function
//! convolution applied to mask-windowed circular shifts of an unknown complex
//! signal. This crate provides:
//!
//! - the circular complex-vector algebra the measurement model is built on
//!   ([`signal`]),
//! - mask / PSF families, including an admissible pair whose lifted system is
//!   provably well conditioned ([`masks`]),
//! - forward simulation with SNR-targeted noise ([`measure`]),
//! - the near-to-far rearrangement and the block-circulant lifted solve
//!   ([`lift`]),
//! - magnitude estimation plus eigenvector and weighted-Laplacian angular
//!   synchronization with spectral-gap diagnostics ([`angsync`]),
//! - a Wirtinger Flow solver with spectral initialization ([`wflow`]),
//! - phase-invariant recovery error metrics ([`metrics`]).
//!
//! Everything is deterministic given the caller-supplied seeds.

pub mod angsync;
pub mod error;
pub mod fft;
pub mod lift;
pub mod linalg;
pub mod masks;
pub mod measure;
pub mod metrics;
pub mod rng;
pub mod signal;
pub mod wflow;

pub use error::{Error, Result};
pub use num_complex;
pub use signal::ComplexSignal;
