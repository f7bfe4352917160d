//! Scalar abstraction: every numeric routine in this crate is generic over an
//! IEEE floating-point type.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps};

/// Floating-point scalar (`f32` or `f64`) for dynamics, spectra and schedules.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssignOps
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` literal into the working scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    /// Shorthand for `2` as a scalar.
    fn two() -> Self {
        Self::one() + Self::one()
    }

    /// Half of `x`.
    fn half(x: Self) -> Self {
        x / Self::two()
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssignOps
        + Sum
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}

/// Euclidean norm of a slice.
pub fn norm<T: Real>(xs: &[T]) -> T {
    xs.iter().map(|&x| x * x).sum::<T>().sqrt()
}

/// Dot product of two equal-length slices.
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}
