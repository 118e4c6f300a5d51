//! Scalar abstraction shared by the analytic code paths.
//!
//! Everything that is closed-form (Green series, kernels, weight functions)
//! is written against [`Scalar`], so it runs in `f32` or `f64`. The grid,
//! Monte Carlo and verification layers are `f64` only: their tolerances are
//! calibrated to double precision.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable by the analytic modules.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Machine epsilon as a plain `f64`, used when sizing truncation targets.
    fn eps_f64() -> f64 {
        Self::epsilon().to_f64().unwrap_or(f64::EPSILON)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Converts a count into the working scalar.
#[inline]
pub fn from_usize<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// Converts a signed integer into the working scalar.
#[inline]
pub fn from_i64<T: Scalar>(n: i64) -> T {
    T::from_i64(n).expect("integer representable in scalar type")
}
