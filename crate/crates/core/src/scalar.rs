//! Scalar abstraction shared by every probability and measure computation.
//!
//! Models, measures and estimators are written against [`Real`] so they can be
//! instantiated with `f64` (the default used by the CLI) or `f32`. Counts are
//! always exact integers; conversion to the scalar happens at the boundary.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};

/// Floating point type usable for probabilities.
pub trait Real:
    'static
    + Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
{
    /// Converts a count. Exact for counts below the mantissa width.
    #[inline]
    fn from_count(count: u64) -> Self {
        Self::from_u64(count).expect("count representable as float")
    }

    /// Converts an `f64` constant or configuration value.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative tolerance used when checking that a distribution sums to one.
    fn normalization_tolerance(len: usize) -> Self {
        let slack = Self::epsilon() * Self::from_count(4 * (len as u64 + 1));
        slack.max(Self::lit(1e-10))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `H(x) = -x ln x`, with `H(0) = 0`.
#[inline]
pub fn entropy_term<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        -x * x.ln()
    }
}
