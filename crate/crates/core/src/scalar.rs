//! Scalar abstractions shared by the numeric modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, Num};

/// Floating point scalar used by the special-function and linear-algebra code: f32 or f64.
pub trait Real:
    Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into this type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_lossy(k: usize) -> Self {
        Self::from_usize(k).expect("usize representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact (or exactly-representing) ordered field, e.g. `Ratio<i64>` or `f64`.
///
/// Rate exponents are rational functions of rational inputs; instantiating with a
/// rational type reproduces tabulated values with zero error.
pub trait ExactField: Num + Clone + PartialOrd + Debug {
    fn int(k: i64) -> Self;
}

impl ExactField for f64 {
    fn int(k: i64) -> Self {
        k as f64
    }
}

impl ExactField for num_rational::Ratio<i64> {
    fn int(k: i64) -> Self {
        num_rational::Ratio::from_integer(k)
    }
}

impl ExactField for num_rational::Ratio<i128> {
    fn int(k: i64) -> Self {
        num_rational::Ratio::from_integer(k as i128)
    }
}
