//! Structure-preserving exponential integrators for semilinear systems
//! y' = J(My + gradU(y)) with polynomial potentials.
//!
//! The crate provides:
//!
//! - a linearly implicit energy-preserving exponential integrator built on
//!   polarized discrete gradients (conserves a polarized energy for
//!   skew-symmetric J, dissipates it for negative semidefinite J, and is
//!   symmetric),
//! - the fully implicit exponential averaged-vector-field scheme and a
//!   sixth-order continuous Runge-Kutta solver as references,
//! - dense matrix exponential / phi-function kernels,
//! - three benchmark problems (wind-induced oscillator, damped alpha-FPU
//!   lattice, polynomial pendulum), and
//! - diagnostics plus a CSV experiment harness driven by TOML configs.
//!
//! All numerical kernels are generic over the scalar type ([`Scalar`]);
//! the aliases below fix f64/f32 instantiations.

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod integrators;
pub mod linalg;
pub mod matfun;
pub mod polarization;
pub mod problems;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix64 = linalg::SquareMatrix<f64>;
pub type Matrix32 = linalg::SquareMatrix<f32>;
pub type MatrixPair64 = matfun::MatrixFunctionPair<f64>;
pub type Potential64 = polarization::PolarizedPotential<f64>;
pub type System64 = integrators::SemilinearSystem<f64>;
pub type Trajectory64 = integrators::Trajectory<f64>;
pub type Window64 = integrators::StepWindow<f64>;
