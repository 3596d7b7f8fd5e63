//! The benchmark systems: their structure matrices, potentials,
//! polarizations, closed-form pieces and initial data.

mod fpu;
mod pendulum;
mod wind;

pub use fpu::{fpu_initial, fpu_system, FpuParams};
pub use pendulum::{pendulum_initial, pendulum_original_energy, pendulum_truncated};
pub use wind::{wind_initial, wind_oscillator, ClosedFormExp, WindOscillatorParams};
