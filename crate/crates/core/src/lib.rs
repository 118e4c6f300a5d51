//! Numerical laboratory for the Suita-type inequality `c_Ω(w)² ≤ π K_Ω(w)`
//! and its higher-order analogues on planar model domains.
//!
//! The analytic layers ([`geometry`], [`green`], [`bergman`], [`weights`])
//! are generic over [`Scalar`]; the numerical layers ([`sublevel`],
//! [`oracles`], [`verify`]) run in `f64`.

// `!(x < y)` comparisons also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bergman;
pub mod error;
pub mod geometry;
pub mod green;
pub mod oracles;
pub mod scalar;
pub mod sublevel;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use geometry::{DomainSpec, Moebius, Point};
pub use green::{CapacityResult, CriticalPoint, GreenFunction, GreenValue};
pub use oracles::McEstimate;
pub use scalar::Scalar;

pub type Domain64 = DomainSpec<f64>;
pub type Domain32 = DomainSpec<f32>;
pub type Point64 = Point<f64>;
pub type GreenValue64 = GreenValue<f64>;
pub type CapacityResult64 = CapacityResult<f64>;
