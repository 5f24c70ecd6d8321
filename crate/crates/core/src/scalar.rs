//! Scalar abstraction: the real field underlying all complex linear algebra.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssignOps, NumCast};

/// Real floating-point scalar: `f32` or `f64`.
///
/// Physical coefficients and tolerances are written as `f64` literals and
/// converted with [`Real::of`]; spectra and expectation values convert back
/// through [`Real::as_f64`] at output boundaries.
pub trait Real:
    Float
    + FromPrimitive
    + NumAssignOps
    + Sum<Self>
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` constant into `Self`.
    fn of(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("f64 constant representable in scalar type")
    }

    /// Widen to `f64`.
    fn as_f64(self) -> f64 {
        <f64 as NumCast>::from(self).expect("real scalar widens to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
