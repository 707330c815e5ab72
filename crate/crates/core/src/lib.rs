//! Gesture recognition from single-channel light-intensity traces.
//!
//! The crate is organized as a pipeline: synthesize or load 6-second
//! reflected-intensity traces ([`synth`], [`io`]), denoise them with a
//! wavelet shrinkage stage ([`wavelet`]), cut out the active gesture
//! ([`segment`]), bring segments onto a common length ([`align`]), and
//! classify with k-nearest-neighbors ([`classify`]). [`pipeline`] chains
//! those stages and [`evaluate`] wraps the chain in k-fold and
//! leave-one-subject-out cross-validation.
//!
//! Numeric kernels are generic over the scalar type through [`Real`]
//! (`f32` or `f64`); the trace-level APIs and the aliases below fix `f64`.

pub mod align;
pub mod classify;
pub mod evaluate;
pub mod io;
pub mod pipeline;
pub mod scalar;
pub mod segment;
pub mod synth;
pub mod types;
pub mod wavelet;

pub use scalar::Real;

/// Multi-level wavelet decomposition of an `f64` signal.
pub type Decomposition = wavelet::WaveletDecomposition<f64>;
/// Wavelet shrinkage settings used throughout the pipeline.
pub type DenoiseConfig = wavelet::DenoiseConfig;
/// Detected gesture extent within an `f64` trace.
pub type Bounds = segment::GestureBounds<f64>;
/// Warping result between two `f64` sequences.
pub type DtwResult = align::DtwResult<f64>;
/// K-nearest-neighbors model over `f64` feature vectors.
pub type Knn = classify::KnnModel<f64>;
