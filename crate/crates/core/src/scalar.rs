//! Scalar abstractions.
//!
//! Analytic routines (special functions, quadrature, the Dickman densities) are
//! written against [`Real`], which any IEEE float satisfies. Purely algebraic
//! routines (renewal laws, convolution dynamic programs) only need [`Scalar`],
//! which is also satisfied by exact rationals.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumAssign, Signed, ToPrimitive};

/// A field element usable by the convolution dynamic programs.
pub trait Scalar:
    Num + NumAssign + Signed + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Num + NumAssign + Signed + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
}

/// A floating point scalar.
pub trait Real: Scalar + Float + FloatConst + Display + Sum + Copy {}

impl<T> Real for T where T: Scalar + Float + FloatConst + Display + Sum + Copy {}

/// Converts an `f64` literal into `T`.
///
/// Panics only if `T` cannot represent finite `f64` values, which no
/// supported scalar does.
#[inline]
pub fn lit<T: FromPrimitive>(x: f64) -> T {
    T::from_f64(x).expect("scalar type cannot represent f64 literal")
}

#[inline]
pub fn from_usize<T: FromPrimitive>(n: usize) -> T {
    T::from_usize(n).expect("scalar type cannot represent usize")
}

/// Lossy view of a scalar as `f64`, used for guards and reporting.
#[inline]
pub fn as_f64<T: ToPrimitive>(x: &T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
