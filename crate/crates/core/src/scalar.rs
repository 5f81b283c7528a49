//! Scalar abstraction shared by the pair-approximation right-hand sides,
//! the enumeration oracle and the integrator.
//!
//! The link-state algebra only needs field operations and an ordering, so
//! it runs unchanged over `f32`, `f64` and exact `BigRational`. Time
//! stepping additionally needs `Float`.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// Field element usable in link-state arithmetic (floats and rationals).
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Exact `num / den` in this field.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("integer fits scalar") / Self::from_i64(den).expect("integer fits scalar")
    }

    fn int(v: i64) -> Self {
        Self::from_i64(v).expect("integer fits scalar")
    }

    /// Lossy conversion for reporting.
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Num + Signed + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
}

/// Floating-point scalar for time integration.
pub trait Real: Scalar + Float + Copy {}

impl<T: Scalar + Float + Copy> Real for T {}

/// `max(a, b)` for partially ordered scalars; NaN-free inputs assumed.
pub(crate) fn max_of<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}
