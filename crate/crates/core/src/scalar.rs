//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating point type the transforms and solvers are generic over.
///
/// Implemented for `f32` and `f64`. The published tolerances (round trip,
/// Parseval, unitarity at `1e-12`) assume `f64`; `f32` is useful for quick
/// previews and memory-bound sweeps.
pub trait Real: Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Debug + Display + Default + Sum {
    /// Converts an `f64` literal. Every constant used in the crate is
    /// representable in both supported types, so this never fails.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_index(i: usize) -> Self {
        Self::from_usize(i).expect("index representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Real for f32 {}
impl Real for f64 {}
