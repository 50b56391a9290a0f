//! Scalar abstraction for values on the cube.
//!
//! Cube-side arithmetic is generic over the value type so that
//! integer-coefficient functions evaluate in exact integer arithmetic while
//! float coefficients share the same code path. Concrete aliases live at the
//! crate root.

use std::fmt::{Debug, Display};

use num_traits::{Float, Num, NumCast};

/// Value type for functions on the cube: `f64`/`f32` for general weights,
/// `i64` for the exact integer escape used by cycle counts.
pub trait Scalar:
    Num + NumCast + PartialOrd + Copy + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Num + NumCast + PartialOrd + Copy + Debug + Display + Send + Sync + 'static
{
}

/// Floating-point scalar for measures, distances and exponential bounds.
pub trait Real: Scalar + Float {}

impl<T> Real for T where T: Scalar + Float {}

/// Conversion to `f64`. Desk-scale integer counts fit in 53 bits, so this is
/// exact for every value the lab produces.
pub fn to_f64<T: Scalar>(value: T) -> f64 {
    num_traits::cast(value).expect("scalar value representable as f64")
}
