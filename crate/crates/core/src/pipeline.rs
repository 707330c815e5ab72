//! The recognition pipeline: denoise → detect/trim → align → standardize.
//!
//! `prepare` turns raw traces into trimmed segments once; featurization then
//! works per train/test split so the common feature length is always derived
//! from training data only (no test-fold leakage).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{self, AlignError};
use crate::segment::{self, SegmentError};
use crate::types::{Dataset, GestureLabel};
use crate::wavelet::{DenoiseConfig, WaveletError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Wavelet(#[from] WaveletError),
    #[error(transparent)]
    Segment(#[from] SegmentError),
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error("dataset has no traces")]
    EmptyDataset,
    #[error("training split is empty")]
    EmptyTrainingSplit,
}

/// Featurization strategy: zero-pad to the training maximum (production
/// path) or warp every segment onto a per-class medoid template via DTW
/// (comparison path; known to hurt accuracy).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlignKind {
    Zeropad,
    DtwToTemplate,
}

impl AlignKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AlignKind::Zeropad => "zeropad",
            AlignKind::DtwToTemplate => "dtw-to-template",
        }
    }
}

impl std::fmt::Display for AlignKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AlignKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zeropad" => Ok(AlignKind::Zeropad),
            "dtw-to-template" | "dtw" => Ok(AlignKind::DtwToTemplate),
            other => Err(format!("unknown alignment {other:?}")),
        }
    }
}

/// Full pipeline configuration. `denoise: None` skips denoising entirely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub denoise: Option<DenoiseConfig>,
    pub detect_factor: f64,
    pub baseline_window: usize,
    pub standardize: bool,
    pub align: AlignKind,
    pub knn_k: usize,
    /// Stratify cross-validation folds by gesture label.
    pub stratified: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            denoise: Some(DenoiseConfig::default()),
            detect_factor: segment::DEFAULT_FACTOR,
            baseline_window: segment::DEFAULT_BASELINE_WINDOW,
            standardize: true,
            align: AlignKind::Zeropad,
            knn_k: 5,
            stratified: true,
        }
    }
}

/// A trace after denoising and trimming. `fallback` marks traces where
/// detection failed (no crossing, too short, or degenerate baseline) and the
/// whole denoised trace was kept instead, so no sample is ever dropped.
#[derive(Debug, Clone)]
pub struct PreparedTrace {
    pub label: GestureLabel,
    pub subject_id: u32,
    pub segment: Vec<f64>,
    pub fallback: bool,
}

/// One trace denoised and trimmed. `fallback` holds the detection error when
/// the gesture could not be located and the full trace was kept instead.
#[derive(Debug)]
pub struct PreparedSegment {
    pub segment: Vec<f64>,
    pub bounds: Option<segment::GestureBounds<f64>>,
    pub fallback: Option<SegmentError>,
}

/// Denoise and trim one raw trace. Detection failures (no crossing, too
/// short, degenerate baseline) fall back to the full denoised trace;
/// configuration errors propagate.
pub fn prepare_samples(
    samples: &[f64],
    cfg: &PipelineConfig,
) -> Result<PreparedSegment, PipelineError> {
    let samples = match &cfg.denoise {
        Some(dcfg) => crate::wavelet::denoise_signal(samples, dcfg)?,
        None => samples.to_vec(),
    };
    match segment::detect_gesture_in(&samples, cfg.detect_factor, cfg.baseline_window) {
        Ok(bounds) => Ok(PreparedSegment {
            segment: segment::trim(&samples, &bounds),
            bounds: Some(bounds),
            fallback: None,
        }),
        Err(
            e @ (SegmentError::NoGesture
            | SegmentError::TooShort { .. }
            | SegmentError::NonPositiveBaseline(_)),
        ) => Ok(PreparedSegment {
            segment: samples,
            bounds: None,
            fallback: Some(e),
        }),
        Err(e) => Err(e.into()),
    }
}

/// Denoise and trim every trace. Detection failures fall back to the full
/// trace; configuration errors propagate.
pub fn prepare(dataset: &Dataset, cfg: &PipelineConfig) -> Result<Vec<PreparedTrace>, PipelineError> {
    if dataset.is_empty() {
        return Err(PipelineError::EmptyDataset);
    }
    let mut out = Vec::with_capacity(dataset.len());
    for trace in &dataset.traces {
        let one = prepare_samples(&trace.samples, cfg)?;
        if let Some(e) = &one.fallback {
            log::warn!(
                "subject {} gesture {}: {e}; keeping the full trace",
                trace.meta.subject_id,
                trace.meta.gesture
            );
        }
        out.push(PreparedTrace {
            label: trace.meta.gesture,
            subject_id: trace.meta.subject_id,
            segment: one.segment,
            fallback: one.fallback.is_some(),
        });
    }
    Ok(out)
}

/// Feature matrices for one train/test split, all rows `feature_len` long.
#[derive(Debug, Clone)]
pub struct FoldFeatures {
    pub train: Vec<Vec<f64>>,
    pub train_labels: Vec<GestureLabel>,
    pub test: Vec<Vec<f64>>,
    pub test_labels: Vec<GestureLabel>,
    pub feature_len: usize,
}

/// Candidate pool size per class for medoid template selection.
const MEDOID_CANDIDATES: usize = 12;

/// Featurize a split. The common length (zero-pad target or template span)
/// is computed from training rows only; over-length test segments are
/// truncated with a warning.
pub fn featurize_split(
    prepared: &[PreparedTrace],
    train_idx: &[usize],
    test_idx: &[usize],
    cfg: &PipelineConfig,
) -> Result<FoldFeatures, PipelineError> {
    if train_idx.is_empty() {
        return Err(PipelineError::EmptyTrainingSplit);
    }
    match cfg.align {
        AlignKind::Zeropad => featurize_zeropad(prepared, train_idx, test_idx, cfg),
        AlignKind::DtwToTemplate => featurize_dtw(prepared, train_idx, test_idx, cfg),
    }
}

/// Convenience wrapper: featurize everything as one training split.
pub fn featurize_all(
    prepared: &[PreparedTrace],
    cfg: &PipelineConfig,
) -> Result<FoldFeatures, PipelineError> {
    let all: Vec<usize> = (0..prepared.len()).collect();
    featurize_split(prepared, &all, &[], cfg)
}

fn featurize_zeropad(
    prepared: &[PreparedTrace],
    train_idx: &[usize],
    test_idx: &[usize],
    cfg: &PipelineConfig,
) -> Result<FoldFeatures, PipelineError> {
    let l_max = train_idx
        .iter()
        .map(|&i| prepared[i].segment.len())
        .max()
        .expect("nonempty training split");

    let featurize = |i: usize| -> Result<Vec<f64>, PipelineError> {
        let seg = &prepared[i].segment;
        let seg = if seg.len() > l_max {
            log::warn!(
                "test segment of {} samples truncated to the training maximum {l_max}",
                seg.len()
            );
            &seg[..l_max]
        } else {
            &seg[..]
        };
        let padded = align::zero_pad(seg, l_max)?;
        if cfg.standardize {
            Ok(align::zscore(&padded)?)
        } else {
            Ok(padded)
        }
    };

    let mut train = Vec::with_capacity(train_idx.len());
    for &i in train_idx {
        train.push(featurize(i)?);
    }
    let mut test = Vec::with_capacity(test_idx.len());
    for &i in test_idx {
        test.push(featurize(i)?);
    }
    Ok(FoldFeatures {
        train,
        train_labels: train_idx.iter().map(|&i| prepared[i].label).collect(),
        test,
        test_labels: test_idx.iter().map(|&i| prepared[i].label).collect(),
        feature_len: l_max,
    })
}

/// DTW featurizer: pick one medoid template per class from the training
/// split, warp every segment onto every template (averaging the samples
/// mapped to each template position), and concatenate the warped versions
/// in label order. Warping molds a segment onto whatever template it is
/// aligned with, so each block is dominated by its template and
/// between-class distinctiveness survives only in the warp residuals.
/// Reproducing that collapse is why this featurizer is shipped. What the
/// original experiment warped against is unstated; the per-class medoid
/// is a documented stand-in.
fn featurize_dtw(
    prepared: &[PreparedTrace],
    train_idx: &[usize],
    test_idx: &[usize],
    cfg: &PipelineConfig,
) -> Result<FoldFeatures, PipelineError> {
    let matching_vec = |i: usize| -> Result<Vec<f64>, PipelineError> {
        if cfg.standardize {
            Ok(align::zscore(&prepared[i].segment)?)
        } else {
            Ok(prepared[i].segment.clone())
        }
    };

    // Deterministic candidate pool per class, in training order.
    let mut class_members: Vec<Vec<usize>> = vec![Vec::new(); GestureLabel::ALL.len()];
    for &i in train_idx {
        let c = prepared[i].label.index();
        if class_members[c].len() < MEDOID_CANDIDATES {
            class_members[c].push(i);
        }
    }

    let mut templates: Vec<Option<Vec<f64>>> = vec![None; GestureLabel::ALL.len()];
    for (c, members) in class_members.iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let vecs: Vec<Vec<f64>> = members
            .iter()
            .map(|&i| matching_vec(i))
            .collect::<Result<_, _>>()?;
        let mut best = 0usize;
        let mut best_sum = f64::INFINITY;
        for (a, va) in vecs.iter().enumerate() {
            let mut sum = 0.0;
            for (b, vb) in vecs.iter().enumerate() {
                if a != b {
                    sum += align::dtw_cost(va, vb)?;
                }
            }
            if sum < best_sum {
                best_sum = sum;
                best = a;
            }
        }
        templates[c] = Some(vecs[best].clone());
    }

    let blocks: Vec<&Vec<f64>> = templates.iter().flatten().collect();
    let feature_len: usize = blocks.iter().map(|t| t.len()).sum();

    // Rows are treated identically regardless of split or label: one warp
    // per template, samples averaged onto the template positions they map
    // to (every position is covered, so the counts are never zero).
    let featurize = |v: &[f64]| -> Result<Vec<f64>, PipelineError> {
        let mut out = Vec::with_capacity(feature_len);
        for t in &blocks {
            let result = align::dtw_distance(v, t)?;
            let mut acc = vec![0.0; t.len()];
            let mut cnt = vec![0usize; t.len()];
            for &(i, j) in &result.path {
                acc[j] += v[i];
                cnt[j] += 1;
            }
            for (a, &c) in acc.iter_mut().zip(&cnt) {
                *a /= c as f64;
            }
            out.extend_from_slice(&acc);
        }
        if cfg.standardize {
            Ok(align::zscore(&out)?)
        } else {
            Ok(out)
        }
    };

    let mut train = Vec::with_capacity(train_idx.len());
    for &i in train_idx {
        train.push(featurize(&matching_vec(i)?)?);
    }
    let mut test = Vec::with_capacity(test_idx.len());
    for &i in test_idx {
        test.push(featurize(&matching_vec(i)?)?);
    }

    Ok(FoldFeatures {
        train,
        train_labels: train_idx.iter().map(|&i| prepared[i].label).collect(),
        test,
        test_labels: test_idx.iter().map(|&i| prepared[i].label).collect(),
        feature_len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{synth_dataset, ScenarioSpec, SynthSpec};

    fn small_dataset() -> Dataset {
        synth_dataset(
            &SynthSpec {
                scenario: ScenarioSpec::preset("ir20").unwrap(),
                subjects: 2,
                reps: 2,
            },
            11,
        )
        .unwrap()
    }

    #[test]
    fn prepare_trims_every_trace() {
        let ds = small_dataset();
        let cfg = PipelineConfig::default();
        let prepared = prepare(&ds, &cfg).unwrap();
        assert_eq!(prepared.len(), ds.len());
        for (p, t) in prepared.iter().zip(&ds.traces) {
            assert_eq!(p.label, t.meta.gesture);
            assert!(!p.segment.is_empty());
            assert!(p.segment.len() <= t.samples.len());
        }
        // At the reference SNR every gesture crossing is found.
        assert!(prepared.iter().all(|p| !p.fallback));
    }

    #[test]
    fn zeropad_features_share_training_length() {
        let ds = small_dataset();
        let cfg = PipelineConfig::default();
        let prepared = prepare(&ds, &cfg).unwrap();
        let train: Vec<usize> = (0..prepared.len()).step_by(2).collect();
        let test: Vec<usize> = (0..prepared.len()).skip(1).step_by(2).collect();
        let ff = featurize_split(&prepared, &train, &test, &cfg).unwrap();

        let l_max = train.iter().map(|&i| prepared[i].segment.len()).max().unwrap();
        assert_eq!(ff.feature_len, l_max);
        assert!(ff.train.iter().all(|r| r.len() == l_max));
        assert!(ff.test.iter().all(|r| r.len() == l_max));
        assert_eq!(ff.train_labels.len(), train.len());

        // Standardized rows have unit sample SD.
        let (_, sd) = crate::align::mean_sd(&ff.train[0]);
        assert!((sd - 1.0).abs() < 1e-9);
    }

    #[test]
    fn oversize_test_segment_is_truncated() {
        let ds = small_dataset();
        let cfg = PipelineConfig::default();
        let mut prepared = prepare(&ds, &cfg).unwrap();
        let train: Vec<usize> = (1..prepared.len()).collect();
        prepared[0].segment = (0..9999).map(|i| 0.3 + 1e-4 * i as f64).collect();
        let ff = featurize_split(&prepared, &train, &[0], &cfg).unwrap();
        let l_max = train.iter().map(|&i| prepared[i].segment.len()).max().unwrap();
        assert_eq!(ff.test[0].len(), l_max);
    }

    #[test]
    fn dtw_features_share_template_length() {
        let ds = small_dataset();
        let cfg = PipelineConfig {
            align: AlignKind::DtwToTemplate,
            ..PipelineConfig::default()
        };
        let prepared = prepare(&ds, &cfg).unwrap();
        let train: Vec<usize> = (0..prepared.len()).step_by(2).collect();
        let test: Vec<usize> = (0..prepared.len()).skip(1).step_by(2).collect();
        let ff = featurize_split(&prepared, &train, &test, &cfg).unwrap();
        assert!(ff.feature_len > 0);
        assert!(ff.train.iter().all(|r| r.len() == ff.feature_len));
        assert!(ff.test.iter().all(|r| r.len() == ff.feature_len));
    }

    #[test]
    fn empty_training_split_is_an_error() {
        let ds = small_dataset();
        let cfg = PipelineConfig::default();
        let prepared = prepare(&ds, &cfg).unwrap();
        assert!(matches!(
            featurize_split(&prepared, &[], &[0], &cfg),
            Err(PipelineError::EmptyTrainingSplit)
        ));
    }

    #[test]
    fn align_kind_round_trips() {
        assert_eq!("zeropad".parse::<AlignKind>().unwrap(), AlignKind::Zeropad);
        assert_eq!(
            "dtw-to-template".parse::<AlignKind>().unwrap(),
            AlignKind::DtwToTemplate
        );
        assert_eq!(AlignKind::DtwToTemplate.to_string(), "dtw-to-template");
        assert!("middle-out".parse::<AlignKind>().is_err());
    }
}
