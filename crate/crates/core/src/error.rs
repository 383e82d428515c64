//! Error types shared by all solver and simulation paths.

use core::fmt;

/// Errors produced by construction, simulation, and recovery routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two operands (or an operand and a configuration) disagree on length.
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// A structural precondition on the inputs is violated (divisibility,
    /// support, parity, index-set kind, ...).
    Config(&'static str),
    /// The input is degenerate for the requested operation (zero signal,
    /// empty measurement set, vanishing initializer).
    DegenerateInput(&'static str),
    /// A Fourier-domain block of the lifted operator is numerically singular.
    IllPosedOperator { block: usize, sigma_min: f64 },
    /// An eigen-iteration failed to reach its tolerance.
    Convergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },
    /// The synchronization graph is disconnected; phases are not identifiable.
    DisconnectedGraph,
    /// Gradient descent produced a non-finite loss.
    Divergence { iteration: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension {
                what,
                expected,
                got,
            } => write!(f, "dimension mismatch in {what}: expected {expected}, got {got}"),
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::DegenerateInput(msg) => write!(f, "degenerate input: {msg}"),
            Error::IllPosedOperator { block, sigma_min } => write!(
                f,
                "lifted operator is ill-posed: Fourier block {block} has sigma_min = {sigma_min:.3e}"
            ),
            Error::Convergence {
                what,
                iterations,
                residual,
            } => write!(
                f,
                "{what} did not converge after {iterations} iterations (residual {residual:.3e})"
            ),
            Error::DisconnectedGraph => {
                write!(f, "synchronization graph is disconnected; phases are undefined")
            }
            Error::Divergence { iteration } => {
                write!(f, "non-finite loss encountered at iteration {iteration}")
            }
        }
    }
}

impl std::error::Error for Error {}
