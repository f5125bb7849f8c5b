//! Scalar abstraction: every numeric routine in this crate is generic over a
//! floating-point type implementing [`Real`].

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, RemAssign, SubAssign};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + RemAssign
    + Sum
    + Display
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` literal; panics only on NaN input, which never
    /// happens for compiled-in constants.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal conversion")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the crate scalar.
pub type Cplx<R> = Complex<R>;

/// `i` as a complex constant.
pub fn imag_unit<R: Real>() -> Cplx<R> {
    Complex::new(R::zero(), R::one())
}
