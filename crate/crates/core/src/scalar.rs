//! Scalar abstraction for the numeric kernels.
//!
//! Every kernel (wavelet transform, thresholding, DTW, standardization, KNN
//! distances) is generic over an IEEE float so the same code runs in f32 or
//! f64. The trace pipeline itself is pinned to f64; see the aliases at the
//! crate root.

use std::fmt::Debug;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// IEEE floating point scalar: f32 or f64.
pub trait Real: Float + FromPrimitive + NumAssign + Sum + Debug + 'static {
    /// Lossy conversion from f64, for filter taps and tuning constants.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in any IEEE float")
    }
}

impl<T> Real for T where T: Float + FromPrimitive + NumAssign + Sum + Debug + 'static {}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm<T: Real>(v: &[T]) -> T {
        v.iter().map(|x| *x * *x).sum::<T>().sqrt()
    }

    #[test]
    fn works_for_both_widths() {
        assert!((norm::<f32>(&[3.0, 4.0]) - 5.0).abs() < 1e-6);
        assert!((norm::<f64>(&[3.0, 4.0]) - 5.0).abs() < 1e-12);
        assert_eq!(f32::from_f64_lossy(0.5), 0.5f32);
    }
}
