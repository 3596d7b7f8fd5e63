//! Floating-point scalar abstraction.
//!
//! All numerical kernels are generic over [`Scalar`] so the same code runs in
//! f32 and f64. The shipped experiments and CLI use f64; tolerances quoted in
//! the documentation assume f64.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, NumCast};

pub trait Scalar:
    Float
    + FromPrimitive
    + NumCast
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Convert an f64 literal (coefficients, quadrature nodes, tolerances).
    fn lit(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("literal not representable")
    }

    /// Lossy view as f64, for error reports and CSV output.
    fn to_f64_lossy(self) -> f64 {
        <f64 as NumCast>::from(self).unwrap_or(f64::NAN)
    }

    fn from_usize_exact(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize not representable")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
