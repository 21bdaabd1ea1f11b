//! Numeric abstraction shared by the estimators and bound formulas.
//!
//! Everything that only needs field arithmetic and ordering is generic over
//! [`Scalar`], so the same code runs on `f32`, `f64` and exact rationals such
//! as `num_rational::Ratio<i64>`. Integer types satisfy the bounds too but
//! truncate on division and should not be used.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, ToPrimitive};

pub trait Scalar:
    Num + PartialOrd + Copy + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Exact conversion of a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable in scalar type")
    }

    /// Lossy conversion used for diagnostics and error payloads.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Num + PartialOrd + Copy + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
}

pub(crate) fn min_of<T: Scalar>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

pub(crate) fn max_of<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

/// Clamp into `[0, 1]`, reporting whether clamping happened.
pub(crate) fn clamp_unit<T: Scalar>(x: T) -> (T, bool) {
    if x < T::zero() {
        (T::zero(), true)
    } else if x > T::one() {
        (T::one(), true)
    } else {
        (x, false)
    }
}
