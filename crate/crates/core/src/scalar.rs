//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating point type the integrators are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances quoted throughout the crate
/// are calibrated for `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal, rounding to the nearest representable value.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `n!` evaluated in the target precision.
pub fn factorial<T: Scalar>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, m| acc * T::from_count(m))
}

/// `[0!, 1!, ..., n!]`.
pub fn factorials<T: Scalar>(n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = T::one();
    out.push(acc);
    for m in 1..=n {
        acc = acc * T::from_count(m);
        out.push(acc);
    }
    out
}

pub(crate) fn max_abs<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}
