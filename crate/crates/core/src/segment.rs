//! Gesture detection on denoised traces: baseline estimation, amplitude
//! thresholding with a guard margin, and trimming.
//!
//! The first 0.5 s of a trace is assumed gesture-free; its mean is the
//! baseline. A gesture spans from the first to the last sample exceeding
//! `baseline · factor`, widened by a 10-sample guard on each side.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;
use crate::types::Trace;

/// Guard margin added on both sides of the threshold crossings, samples.
pub const GUARD_SAMPLES: usize = 10;
/// Segments spanning fewer samples than this are rejected as noise blips.
pub const MIN_SEGMENT_SAMPLES: usize = 50;
/// Baseline window: first 0.5 s at the reference 100 Hz rate.
pub const DEFAULT_BASELINE_WINDOW: usize = 50;
/// Default detection factor: threshold sits 10% above the baseline.
pub const DEFAULT_FACTOR: f64 = 1.10;

#[derive(Debug, Error)]
pub enum SegmentError {
    #[error("trace is empty")]
    EmptyTrace,
    #[error("detection factor must be > 1, got {0}")]
    InvalidFactor(f64),
    #[error("baseline window must be within 1..=len, got {window} for {len} samples")]
    InvalidWindow { window: usize, len: usize },
    #[error("baseline {0} is not positive; thresholding undefined")]
    NonPositiveBaseline(f64),
    #[error("no sample exceeds the detection threshold")]
    NoGesture,
    #[error("detected span of {span} samples is below the {MIN_SEGMENT_SAMPLES}-sample floor")]
    TooShort { span: usize },
}

/// Detected gesture extent. `start_idx..=end_idx` is inclusive;
/// `baseline_suspect` marks traces whose baseline window looks contaminated
/// (baseline above the trace median, i.e. the gesture may already be in
/// progress at t = 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GestureBounds<T> {
    pub start_idx: usize,
    pub end_idx: usize,
    pub baseline: T,
    pub threshold: T,
    pub baseline_suspect: bool,
}

/// Arithmetic mean of the first `window` samples.
pub fn estimate_baseline<T: Real>(samples: &[T], window: usize) -> Result<T, SegmentError> {
    if samples.is_empty() {
        return Err(SegmentError::EmptyTrace);
    }
    if window == 0 || window > samples.len() {
        return Err(SegmentError::InvalidWindow {
            window,
            len: samples.len(),
        });
    }
    let sum: T = samples[..window].iter().copied().sum();
    Ok(sum / T::from_f64_lossy(window as f64))
}

fn median<T: Real>(samples: &[T]) -> T {
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / T::from_f64_lossy(2.0)
    }
}

/// Threshold-crossing detection over raw samples. `factor` must exceed 1;
/// the threshold is `baseline · factor`.
pub fn detect_gesture_in<T: Real>(
    samples: &[T],
    factor: T,
    baseline_window: usize,
) -> Result<GestureBounds<T>, SegmentError> {
    if !(factor > T::one()) {
        return Err(SegmentError::InvalidFactor(
            factor.to_f64().unwrap_or(f64::NAN),
        ));
    }
    let baseline = estimate_baseline(samples, baseline_window)?;
    if baseline <= T::zero() {
        return Err(SegmentError::NonPositiveBaseline(
            baseline.to_f64().unwrap_or(f64::NAN),
        ));
    }
    let threshold = baseline * factor;
    let first = samples
        .iter()
        .position(|s| *s > threshold)
        .ok_or(SegmentError::NoGesture)?;
    let last = samples
        .iter()
        .rposition(|s| *s > threshold)
        .expect("a forward match implies a backward match");
    let start_idx = first.saturating_sub(GUARD_SAMPLES);
    let end_idx = (last + GUARD_SAMPLES).min(samples.len() - 1);
    let span = end_idx - start_idx;
    if span < MIN_SEGMENT_SAMPLES {
        return Err(SegmentError::TooShort { span });
    }
    Ok(GestureBounds {
        start_idx,
        end_idx,
        baseline,
        threshold,
        baseline_suspect: baseline > median(samples),
    })
}

/// Trace-level detection with the default 0.5 s baseline window.
pub fn detect_gesture(trace: &Trace, factor: f64) -> Result<GestureBounds<f64>, SegmentError> {
    detect_gesture_in(&trace.samples, factor, DEFAULT_BASELINE_WINDOW)
}

/// Extract `samples[start_idx..=end_idx]`. Bounds must be valid for the
/// slice (checked detection output always is).
pub fn trim<T: Real>(samples: &[T], bounds: &GestureBounds<T>) -> Vec<T> {
    assert!(
        bounds.start_idx < bounds.end_idx && bounds.end_idx < samples.len(),
        "bounds ({}, {}) invalid for {} samples",
        bounds.start_idx,
        bounds.end_idx,
        samples.len()
    );
    samples[bounds.start_idx..=bounds.end_idx].to_vec()
}
