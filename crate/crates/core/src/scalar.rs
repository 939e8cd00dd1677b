//! Scalar abstraction: all numerics are generic over the working precision.

use nalgebra::{ComplexField, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar the library computes with: `f32` or `f64`.
///
/// Bundles what the FFT backend, the linear algebra and the generic
/// math all need. Tolerances in the public API are stated for `f64`;
/// with `f32` they must be relaxed by the caller.
pub trait Scalar: RealField + FftNum + FromPrimitive + ToPrimitive + Default + Copy {}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn cast<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("constant not representable in scalar type")
}

/// Lossy view of a scalar as `f64`, for reports and error messages.
#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `|x|` spelled so it does not collide with `num_traits::Signed::abs`.
#[inline]
pub fn rabs<T: Scalar>(x: T) -> T {
    ComplexField::abs(x)
}

/// Modulus of a complex value without requiring `num_traits::Float`.
#[inline]
pub fn cnorm<T: Scalar>(z: Complex<T>) -> T {
    z.norm_sqr().sqrt()
}

/// Machine epsilon of the working scalar, computed by halving.
pub fn machine_epsilon<T: Scalar>() -> T {
    let two = cast::<T>(2.0);
    let mut e = T::one();
    while T::one() + e / two > T::one() {
        e /= two;
    }
    e
}

#[inline]
pub fn fmax<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

#[inline]
pub fn fmin<T: Scalar>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}
