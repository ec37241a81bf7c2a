//! Scalar abstraction: the numeric code is generic over the floating-point
//! type through [`Real`], with `f64` as the default type parameter everywhere
//! a struct is generic.

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar used throughout the crate.
///
/// `f64` is the working type of the verification suite and the CLI; `f32` is
/// supported for the library API (type-parameter defaults pick `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + core::ops::AddAssign
    + core::ops::SubAssign
    + core::ops::MulAssign
    + core::ops::DivAssign
    + core::iter::Sum
    + core::fmt::Debug
    + core::fmt::Display
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`. Panics only if the target type cannot
/// represent any `f64` at all, which none of the supported scalars trigger.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal must convert into the scalar type")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_roundtrip() {
        let x: f64 = lit(0.375);
        assert_eq!(x, 0.375);
        let y: f32 = lit(0.375);
        assert_eq!(y, 0.375f32);
    }
}
