//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point type the operator algebra is generic over (`f32` or `f64`).
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync
{
    /// Default value for every entry of [`Tolerances`](crate::Tolerances).
    const DEFAULT_EPS: f64;

    /// Converts an `f64` literal. Panics only if the value is not representable at all.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal not representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const DEFAULT_EPS: f64 = 1e-9;
}

// 1e-9 is below f32 resolution; keep the defaults a few ulps above round-off.
impl Real for f32 {
    const DEFAULT_EPS: f64 = 1e-4;
}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;

pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

pub(crate) fn c_zero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

pub(crate) fn c_one<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

pub(crate) fn modulus<T: Real>(z: C<T>) -> T {
    z.norm_sqr().sqrt()
}
