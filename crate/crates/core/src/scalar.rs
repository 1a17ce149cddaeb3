//! Scalar abstraction for the numeric kernels.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar type the numeric kernels are generic over.
///
/// Implemented by `f32` and `f64`. The blanket impl covers any float type
/// that can round-trip through `f64` constants.
pub trait Real: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + 'static {}

impl<T> Real for T where T: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + 'static {}

/// Lifts an `f64` constant into the generic scalar.
#[inline]
pub fn real<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("f64 constant must be representable")
}

/// Lifts a count into the generic scalar.
#[inline]
pub fn from_count<F: Real>(n: usize) -> F {
    F::from_usize(n).expect("count must be representable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifts_constants_for_both_widths() {
        let a: f32 = real(2.5);
        let b: f64 = real(2.5);
        assert_eq!(a, 2.5f32);
        assert_eq!(b, 2.5f64);
        let c: f32 = from_count(7);
        assert_eq!(c, 7.0);
    }
}
