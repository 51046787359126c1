//! Floating point abstraction shared by every model in the crate.

use std::fmt;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar type the simulations are generic over (`f32` or `f64`).
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        // from_f64 only fails for types that cannot represent a finite f64 at all
        Self::from_f64(x).expect("scalar conversion from f64")
    }

    /// Lossy conversion to `f64`, used for error reporting and serialization.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::infinity)
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
