//! Error types shared across the crate.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// An input matrix or vector contained NaN or infinite entries.
    NonFiniteInput { context: &'static str },
    /// Matrix entries overflowed during repeated squaring.
    Overflow { norm: f64 },
    /// Dimension mismatch between operands.
    ShapeMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    /// Monomial degree outside the supported polarization table.
    UnsupportedDegree { degree: usize },
    /// Requested polarization window shorter than the polynomial requires.
    WindowTooSmall { required: usize, got: usize },
    /// A problem parameter violated its documented range.
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// Structure matrix failed its declared symmetry/definiteness class.
    StructureViolation {
        what: &'static str,
        residual: f64,
    },
    /// A polarization energy is not invariant under argument permutations.
    NotPermutationFree { residual: f64 },
    /// Dense LU factorization hit a (near-)zero pivot.
    SingularMatrix { pivot_ratio: f64 },
    /// The linearly implicit step matrix was singular at this step size.
    StepSingular { h: f64, pivot_ratio: f64 },
    /// Fixed-point iteration did not reach tolerance within the iteration cap.
    NonConvergence { iterations: usize, residual: f64 },
    /// Fixed-point iteration residual grew repeatedly, or a state went non-finite.
    Divergence { iterations: usize, residual: f64 },
    /// Trajectory comparison on different time grids.
    GridMismatch { detail: &'static str },
    /// Too few data points for the requested estimate.
    InsufficientData { needed: usize, got: usize },
    /// Invalid experiment configuration.
    Config(String),
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFiniteInput { context } => {
                write!(f, "non-finite entries in {context}")
            }
            Error::Overflow { norm } => {
                write!(f, "overflow during matrix squaring (input norm {norm:e})")
            }
            Error::ShapeMismatch {
                context,
                expected,
                got,
            } => write!(f, "{context}: expected dimension {expected}, got {got}"),
            Error::UnsupportedDegree { degree } => {
                write!(f, "no built-in polarization for degree {degree}")
            }
            Error::WindowTooSmall { required, got } => {
                write!(f, "window {got} too small, polynomial needs {required}")
            }
            Error::ParameterOutOfRange {
                name,
                value,
                expected,
            } => write!(f, "parameter {name} = {value} outside {expected}"),
            Error::StructureViolation { what, residual } => {
                write!(f, "{what} violated (residual {residual:e})")
            }
            Error::NotPermutationFree { residual } => {
                write!(f, "polarization not permutation free (residual {residual:e})")
            }
            Error::SingularMatrix { pivot_ratio } => {
                write!(f, "singular matrix in LU solve (pivot ratio {pivot_ratio:e})")
            }
            Error::StepSingular { h, pivot_ratio } => write!(
                f,
                "singular step matrix at h = {h} (pivot ratio {pivot_ratio:e})"
            ),
            Error::NonConvergence {
                iterations,
                residual,
            } => write!(
                f,
                "fixed-point iteration stalled after {iterations} iterations (residual {residual:e})"
            ),
            Error::Divergence {
                iterations,
                residual,
            } => write!(
                f,
                "fixed-point iteration diverged after {iterations} iterations (residual {residual:e})"
            ),
            Error::GridMismatch { detail } => write!(f, "time grid mismatch: {detail}"),
            Error::InsufficientData { needed, got } => {
                write!(f, "need at least {needed} data points, got {got}")
            }
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl Error {
    /// Short machine-readable tag, used in CSV failure rows.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonFiniteInput { .. } => "non_finite_input",
            Error::Overflow { .. } => "overflow",
            Error::ShapeMismatch { .. } => "shape_mismatch",
            Error::UnsupportedDegree { .. } => "unsupported_degree",
            Error::WindowTooSmall { .. } => "window_too_small",
            Error::ParameterOutOfRange { .. } => "parameter_out_of_range",
            Error::StructureViolation { .. } => "structure_violation",
            Error::NotPermutationFree { .. } => "not_permutation_free",
            Error::SingularMatrix { .. } => "singular_matrix",
            Error::StepSingular { .. } => "step_singular",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Divergence { .. } => "divergence",
            Error::GridMismatch { .. } => "grid_mismatch",
            Error::InsufficientData { .. } => "insufficient_data",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}
