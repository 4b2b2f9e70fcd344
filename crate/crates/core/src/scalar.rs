//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps};
use serde::Serialize;

/// Real scalar used for reflectivities and amplitude components: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssignOps
    + Sum
    + Default
    + Debug
    + Display
    + Serialize
    + Send
    + Sync
    + 'static
{
    /// Widen to `f64` for reporting.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Convert an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// `n!` as a scalar. Only small `n` occur (at most the sector photon number).
pub(crate) fn factorial<T: Real>(n: u32) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * lit::<T>(f64::from(k)))
}

pub(crate) fn binomial<T: Real>(n: u32, k: u32) -> T {
    if k > n {
        return T::zero();
    }
    factorial::<T>(n) / (factorial::<T>(k) * factorial::<T>(n - k))
}
