//! Cross-validation protocols, confusion matrices, and spectral diagnostics.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{ClassifyError, KnnModel};
use crate::pipeline::{self, AlignKind, PipelineConfig, PipelineError, PreparedTrace};
use crate::types::{Dataset, GestureLabel, Trace, NUM_GESTURES};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{n} samples cannot fill {k} folds")]
    TooFewSamples { n: usize, k: usize },
    #[error("fold count must be ≥ 2, got {0}")]
    KTooSmall(usize),
    #[error("leave-one-subject-out needs ≥ 2 subjects")]
    SingleSubject,
    #[error("{truths} truths vs {predictions} predictions")]
    LengthMismatch { truths: usize, predictions: usize },
    #[error("unknown protocol {0:?} (expected kfold<N> or loso)")]
    BadProtocol(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// Validation protocol identifier, rendered as `kfold10` / `loso`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    KFold(usize),
    Loso,
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Protocol::KFold(k) => write!(f, "kfold{k}"),
            Protocol::Loso => write!(f, "loso"),
        }
    }
}

impl std::str::FromStr for Protocol {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "loso" {
            return Ok(Protocol::Loso);
        }
        if let Some(num) = s.strip_prefix("kfold") {
            if let Ok(k) = num.parse::<usize>() {
                return Ok(Protocol::KFold(k));
            }
        }
        Err(EvalError::BadProtocol(s.to_string()))
    }
}

impl Serialize for Protocol {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Protocol {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Row-normalized 8×8 confusion table: row = performed gesture, column =
/// estimated gesture. Rows with zero support stay all-zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub rows: [[f64; NUM_GESTURES]; NUM_GESTURES],
    pub support: [usize; NUM_GESTURES],
}

impl ConfusionMatrix {
    pub fn from_pairs(
        truths: &[GestureLabel],
        predictions: &[GestureLabel],
    ) -> Result<ConfusionMatrix, EvalError> {
        if truths.len() != predictions.len() {
            return Err(EvalError::LengthMismatch {
                truths: truths.len(),
                predictions: predictions.len(),
            });
        }
        let mut counts = [[0usize; NUM_GESTURES]; NUM_GESTURES];
        let mut support = [0usize; NUM_GESTURES];
        for (t, p) in truths.iter().zip(predictions) {
            counts[t.index()][p.index()] += 1;
            support[t.index()] += 1;
        }
        let mut rows = [[0.0; NUM_GESTURES]; NUM_GESTURES];
        for r in 0..NUM_GESTURES {
            if support[r] > 0 {
                for c in 0..NUM_GESTURES {
                    rows[r][c] = counts[r][c] as f64 / support[r] as f64;
                }
            }
        }
        Ok(ConfusionMatrix { rows, support })
    }

    /// Mean per-class recall over rows with support.
    pub fn diagonal_mean(&self) -> f64 {
        let mut sum = 0.0;
        let mut n = 0usize;
        for r in 0..NUM_GESTURES {
            if self.support[r] > 0 {
                sum += self.rows[r][r];
                n += 1;
            }
        }
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }

    /// Support-weighted diagonal sum, i.e. overall accuracy.
    pub fn weighted_accuracy(&self) -> f64 {
        let total: usize = self.support.iter().sum();
        if total == 0 {
            return 0.0;
        }
        let correct: f64 = (0..NUM_GESTURES)
            .map(|r| self.rows[r][r] * self.support[r] as f64)
            .sum();
        correct / total as f64
    }

    /// 8×8 CSV in label order, one header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("truth");
        for g in GestureLabel::ALL {
            out.push(',');
            out.push_str(g.as_str());
        }
        out.push('\n');
        for (r, g) in GestureLabel::ALL.iter().enumerate() {
            out.push_str(g.as_str());
            for c in 0..NUM_GESTURES {
                out.push(',');
                out.push_str(&format!("{}", self.rows[r][c]));
            }
            out.push('\n');
        }
        out
    }
}

/// Row-normalized confusion matrix from truth/prediction pairs.
pub fn confusion_matrix(
    truths: &[GestureLabel],
    predictions: &[GestureLabel],
) -> Result<ConfusionMatrix, EvalError> {
    ConfusionMatrix::from_pairs(truths, predictions)
}

/// Fraction of matching pairs.
pub fn accuracy(truths: &[GestureLabel], predictions: &[GestureLabel]) -> f64 {
    if truths.is_empty() {
        return 0.0;
    }
    let hits = truths
        .iter()
        .zip(predictions)
        .filter(|(t, p)| t == p)
        .count();
    hits as f64 / truths.len() as f64
}

/// Aggregated validation outcome. The averaged confusion matrix is the
/// per-row mean over the folds in which that class had test support (all
/// folds, under stratification); `accuracy_sd` uses the n−1 divisor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub protocol: Protocol,
    pub seed: u64,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub accuracy_sd: f64,
    pub confusion: ConfusionMatrix,
}

/// Per-fold predictions, for partition audits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub test_indices: Vec<usize>,
    pub truths: Vec<GestureLabel>,
    pub predictions: Vec<GestureLabel>,
}

/// Split `0..labels.len()` into k disjoint folds with sizes differing by at
/// most one. Stratified mode deals each label's shuffled members through a
/// global round-robin pointer, balancing every label across folds.
pub fn kfold_split(
    labels: &[GestureLabel],
    k: usize,
    seed: u64,
    stratified: bool,
) -> Result<Vec<Vec<usize>>, EvalError> {
    let n = labels.len();
    if k < 2 {
        return Err(EvalError::KTooSmall(k));
    }
    if n < k {
        return Err(EvalError::TooFewSamples { n, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    if stratified {
        let mut pointer = 0usize;
        for label in GestureLabel::ALL {
            let mut members: Vec<usize> = (0..n).filter(|&i| labels[i] == label).collect();
            members.shuffle(&mut rng);
            for idx in members {
                folds[pointer % k].push(idx);
                pointer += 1;
            }
        }
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        for (i, idx) in order.into_iter().enumerate() {
            folds[i % k].push(idx);
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

fn run_folds(
    prepared: &[PreparedTrace],
    folds: &[Vec<usize>],
    cfg: &PipelineConfig,
    protocol: Protocol,
    seed: u64,
) -> Result<(EvalReport, Vec<FoldOutcome>), EvalError> {
    let n = prepared.len();
    let mut fold_accuracies = Vec::with_capacity(folds.len());
    let mut fold_matrices = Vec::with_capacity(folds.len());
    let mut outcomes = Vec::with_capacity(folds.len());

    for test_idx in folds {
        let mut in_test = vec![false; n];
        for &i in test_idx {
            in_test[i] = true;
        }
        let train_idx: Vec<usize> = (0..n).filter(|&i| !in_test[i]).collect();

        let ff = pipeline::featurize_split(prepared, &train_idx, test_idx, cfg)?;
        let model = KnnModel::train(&ff.train, &ff.train_labels, cfg.knn_k)?;
        let mut predictions = Vec::with_capacity(ff.test.len());
        for row in &ff.test {
            predictions.push(model.predict(row)?.label);
        }

        fold_accuracies.push(accuracy(&ff.test_labels, &predictions));
        fold_matrices.push(ConfusionMatrix::from_pairs(&ff.test_labels, &predictions)?);
        outcomes.push(FoldOutcome {
            test_indices: test_idx.clone(),
            truths: ff.test_labels,
            predictions,
        });
    }

    let f = fold_accuracies.len() as f64;
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / f;
    let accuracy_sd = if fold_accuracies.len() > 1 {
        (fold_accuracies
            .iter()
            .map(|a| (a - mean_accuracy) * (a - mean_accuracy))
            .sum::<f64>()
            / (f - 1.0))
            .sqrt()
    } else {
        0.0
    };

    let mut rows = [[0.0; NUM_GESTURES]; NUM_GESTURES];
    let mut support = [0usize; NUM_GESTURES];
    for r in 0..NUM_GESTURES {
        let contributing: Vec<&ConfusionMatrix> = fold_matrices
            .iter()
            .filter(|m| m.support[r] > 0)
            .collect();
        for m in &fold_matrices {
            support[r] += m.support[r];
        }
        if !contributing.is_empty() {
            for c in 0..NUM_GESTURES {
                rows[r][c] = contributing.iter().map(|m| m.rows[r][c]).sum::<f64>()
                    / contributing.len() as f64;
            }
        }
    }

    Ok((
        EvalReport {
            protocol,
            seed,
            fold_accuracies,
            mean_accuracy,
            accuracy_sd,
            confusion: ConfusionMatrix { rows, support },
        },
        outcomes,
    ))
}

/// K-fold cross-validation, with per-fold predictions.
pub fn cross_validate_detailed(
    dataset: &Dataset,
    cfg: &PipelineConfig,
    k: usize,
    seed: u64,
) -> Result<(EvalReport, Vec<FoldOutcome>), EvalError> {
    let prepared = pipeline::prepare(dataset, cfg)?;
    let labels: Vec<GestureLabel> = prepared.iter().map(|p| p.label).collect();
    let folds = kfold_split(&labels, k, seed, cfg.stratified)?;
    run_folds(&prepared, &folds, cfg, Protocol::KFold(k), seed)
}

/// K-fold cross-validation.
pub fn cross_validate(
    dataset: &Dataset,
    cfg: &PipelineConfig,
    k: usize,
    seed: u64,
) -> Result<EvalReport, EvalError> {
    cross_validate_detailed(dataset, cfg, k, seed).map(|(r, _)| r)
}

/// Leave-one-subject-out validation: one fold per subject, ascending
/// subject id. There is no sampling, so the report's seed is fixed at 0.
pub fn leave_one_subject_out_detailed(
    dataset: &Dataset,
    cfg: &PipelineConfig,
) -> Result<(EvalReport, Vec<FoldOutcome>), EvalError> {
    let prepared = pipeline::prepare(dataset, cfg)?;
    let subjects = dataset.subjects();
    if subjects.len() < 2 {
        return Err(EvalError::SingleSubject);
    }
    let folds: Vec<Vec<usize>> = subjects
        .iter()
        .map(|&s| {
            (0..prepared.len())
                .filter(|&i| prepared[i].subject_id == s)
                .collect()
        })
        .collect();
    run_folds(&prepared, &folds, cfg, Protocol::Loso, 0)
}

pub fn leave_one_subject_out(
    dataset: &Dataset,
    cfg: &PipelineConfig,
) -> Result<EvalReport, EvalError> {
    leave_one_subject_out_detailed(dataset, cfg).map(|(r, _)| r)
}

/// Magnitude spectrum of the mean-removed signal: bins 0..=n/2, i.e. up to
/// the Nyquist frequency.
pub fn spectrum_of(samples: &[f64], sample_rate: f64) -> (Vec<f64>, Vec<f64>) {
    let n = samples.len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = samples
        .iter()
        .map(|&v| Complex::new(v - mean, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let bins = n / 2 + 1;
    let freqs = (0..bins).map(|k| k as f64 * sample_rate / n as f64).collect();
    let mags = buf[..bins].iter().map(|c| c.norm()).collect();
    (freqs, mags)
}

/// Trace-level power spectrum (frequencies 0..=Nyquist).
pub fn power_spectrum(trace: &Trace) -> (Vec<f64>, Vec<f64>) {
    spectrum_of(&trace.samples, trace.sample_rate)
}

/// Pipeline switches exercised by the ablation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AblationToggles {
    pub denoise: bool,
    pub standardize: bool,
    pub align: AlignKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub toggles: AblationToggles,
    pub report: EvalReport,
}

/// Apply toggles onto a base configuration.
pub fn apply_toggles(base: &PipelineConfig, toggles: &AblationToggles) -> PipelineConfig {
    PipelineConfig {
        denoise: if toggles.denoise {
            Some(base.denoise.clone().unwrap_or_default())
        } else {
            None
        },
        standardize: toggles.standardize,
        align: toggles.align,
        ..base.clone()
    }
}

/// Evaluate every toggle combination side by side under one seed.
pub fn ablation_run(
    dataset: &Dataset,
    base: &PipelineConfig,
    k: usize,
    seed: u64,
) -> Result<Vec<AblationRow>, EvalError> {
    let mut rows = Vec::new();
    for denoise in [true, false] {
        for standardize in [true, false] {
            for align in [AlignKind::Zeropad, AlignKind::DtwToTemplate] {
                let toggles = AblationToggles {
                    denoise,
                    standardize,
                    align,
                };
                let report = cross_validate(dataset, &apply_toggles(base, &toggles), k, seed)?;
                rows.push(AblationRow { toggles, report });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{synth_dataset, ScenarioSpec, SynthSpec};
    use crate::types::{LightSource, Lighting, TraceMeta, SAMPLE_RATE_HZ, TRACE_LEN};
    use std::collections::BTreeSet;

    fn small_dataset(seed: u64) -> Dataset {
        synth_dataset(
            &SynthSpec {
                scenario: ScenarioSpec::preset("ir20").unwrap(),
                subjects: 2,
                reps: 3,
            },
            seed,
        )
        .unwrap()
    }

    #[test]
    fn kfold_partitions_with_balanced_sizes() {
        let labels: Vec<GestureLabel> = (0..960)
            .map(|i| GestureLabel::from_index(i % 8).unwrap())
            .collect();
        let folds = kfold_split(&labels, 10, 7, true).unwrap();
        assert_eq!(folds.len(), 10);
        assert!(folds.iter().all(|f| f.len() == 96));

        let mut seen = BTreeSet::new();
        for fold in &folds {
            for &i in fold {
                assert!(seen.insert(i), "index {i} appears twice");
            }
        }
        assert_eq!(seen.len(), 960);

        // Stratification: every fold holds 12 of each label.
        for fold in &folds {
            for label in GestureLabel::ALL {
                let count = fold.iter().filter(|&&i| labels[i] == label).count();
                assert_eq!(count, 12);
            }
        }
    }

    #[test]
    fn kfold_is_deterministic_and_seed_sensitive() {
        let labels: Vec<GestureLabel> = (0..95)
            .map(|i| GestureLabel::from_index(i % 8).unwrap())
            .collect();
        let a = kfold_split(&labels, 10, 5, true).unwrap();
        let b = kfold_split(&labels, 10, 5, true).unwrap();
        assert_eq!(a, b);
        let c = kfold_split(&labels, 10, 6, true).unwrap();
        assert_ne!(a, c);

        // 95 samples in 10 folds: sizes 9 or 10, differing by ≤ 1.
        let sizes: Vec<usize> = a.iter().map(Vec::len).collect();
        assert!(sizes.iter().all(|&s| s == 9 || s == 10));

        let plain = kfold_split(&labels, 10, 5, false).unwrap();
        let total: usize = plain.iter().map(Vec::len).sum();
        assert_eq!(total, 95);
    }

    #[test]
    fn kfold_boundary_cases() {
        let labels = vec![GestureLabel::A; 8];
        let folds = kfold_split(&labels, 8, 1, true).unwrap();
        assert!(folds.iter().all(|f| f.len() == 1));
        assert!(matches!(
            kfold_split(&labels, 9, 1, true),
            Err(EvalError::TooFewSamples { n: 8, k: 9 })
        ));
        assert!(matches!(
            kfold_split(&labels, 1, 1, true),
            Err(EvalError::KTooSmall(1))
        ));
    }

    #[test]
    fn confusion_matrix_examples() {
        use GestureLabel::{A, C};
        let all = [A, C, A, C];
        let m = confusion_matrix(&all, &all).unwrap();
        for r in 0..NUM_GESTURES {
            for c in 0..NUM_GESTURES {
                let expected = if r == c && m.support[r] > 0 { 1.0 } else { 0.0 };
                assert_eq!(m.rows[r][c], expected);
            }
        }

        let m2 = confusion_matrix(&[A], &[C]).unwrap();
        assert_eq!(m2.rows[0][2], 1.0);
        assert_eq!(m2.rows[0][0], 0.0);
        assert_eq!(m2.support[0], 1);
        // Zero-support rows stay all-zero.
        assert!(m2.rows[1].iter().all(|&v| v == 0.0));

        assert!(matches!(
            confusion_matrix(&[A], &[A, C]),
            Err(EvalError::LengthMismatch { .. })
        ));
    }

    fn clustered_dataset() -> Dataset {
        // Eight classes, each a rectangular bump of a class-specific width.
        // Segmentation discards position, so the discriminative cue must
        // survive trimming: here it is the segment length itself.
        let mut traces = Vec::new();
        for (ci, gesture) in GestureLabel::ALL.into_iter().enumerate() {
            for rep in 0..12 {
                let mut samples = vec![0.2; TRACE_LEN];
                let width = 60 + ci * 25;
                for v in samples.iter_mut().skip(100).take(width) {
                    *v = 0.5 + 0.001 * (rep % 3) as f64;
                }
                traces.push(Trace {
                    samples,
                    sample_rate: SAMPLE_RATE_HZ,
                    meta: TraceMeta {
                        subject_id: 1 + (rep % 4) as u32,
                        gesture,
                        distance_cm: 20.0,
                        source: LightSource::Infrared,
                        lighting: Lighting::On,
                        seed: rep as u64,
                    },
                });
            }
        }
        Dataset::from_traces(traces).unwrap()
    }

    #[test]
    fn separable_clusters_reach_perfect_accuracy() {
        let ds = clustered_dataset();
        let cfg = PipelineConfig::default();
        let report = cross_validate(&ds, &cfg, 10, 3).unwrap();
        assert_eq!(report.mean_accuracy, 1.0);
        assert_eq!(report.accuracy_sd, 0.0);
        for r in 0..NUM_GESTURES {
            assert_eq!(report.confusion.rows[r][r], 1.0);
        }
        assert_eq!(report.protocol.to_string(), "kfold10");
    }

    #[test]
    fn every_sample_predicted_exactly_once() {
        let ds = small_dataset(19);
        let cfg = PipelineConfig::default();
        let (report, outcomes) = cross_validate_detailed(&ds, &cfg, 10, 4).unwrap();
        assert_eq!(report.fold_accuracies.len(), 10);

        let mut seen = BTreeSet::new();
        for o in &outcomes {
            assert_eq!(o.test_indices.len(), o.predictions.len());
            for &i in &o.test_indices {
                assert!(seen.insert(i));
            }
        }
        assert_eq!(seen.len(), ds.len());

        // Mean is the arithmetic mean of fold accuracies.
        let mean: f64 =
            report.fold_accuracies.iter().sum::<f64>() / report.fold_accuracies.len() as f64;
        assert!((report.mean_accuracy - mean).abs() < 1e-15);

        // Averaged matrix rows stay row-stochastic.
        for r in 0..NUM_GESTURES {
            if report.confusion.support[r] > 0 {
                let sum: f64 = report.confusion.rows[r].iter().sum();
                assert!((sum - 1.0).abs() < 1e-9, "row {r} sums to {sum}");
            }
        }
    }

    #[test]
    fn loso_folds_follow_subjects() {
        let ds = small_dataset(23);
        let cfg = PipelineConfig::default();
        let (report, outcomes) = leave_one_subject_out_detailed(&ds, &cfg).unwrap();
        assert_eq!(report.protocol, Protocol::Loso);
        assert_eq!(outcomes.len(), 2);

        let total: usize = outcomes.iter().map(|o| o.test_indices.len()).sum();
        assert_eq!(total, ds.len());
        // Fold order is ascending subject id.
        assert!(outcomes[0]
            .test_indices
            .iter()
            .all(|&i| ds.traces[i].meta.subject_id == 1));

        let single = synth_dataset(
            &SynthSpec {
                scenario: ScenarioSpec::preset("ir20").unwrap(),
                subjects: 1,
                reps: 3,
            },
            5,
        )
        .unwrap();
        assert!(matches!(
            leave_one_subject_out(&single, &cfg),
            Err(EvalError::SingleSubject)
        ));
    }

    #[test]
    fn feature_length_ignores_test_fold_content() {
        let ds = small_dataset(31);
        let cfg = PipelineConfig::default();
        let prepared = pipeline::prepare(&ds, &cfg).unwrap();
        let labels: Vec<GestureLabel> = prepared.iter().map(|p| p.label).collect();
        let folds = kfold_split(&labels, 10, 9, true).unwrap();

        let test_idx = &folds[0];
        let train_idx: Vec<usize> = (0..prepared.len())
            .filter(|i| !test_idx.contains(i))
            .collect();
        let real = pipeline::featurize_split(&prepared, &train_idx, test_idx, &cfg).unwrap();

        // Replace every test segment with junk of a different length.
        let mut scrambled = prepared.clone();
        for (j, &i) in test_idx.iter().enumerate() {
            scrambled[i].segment = (0..37 + j).map(|v| (v as f64 * 0.717).sin()).collect();
        }
        let redone = pipeline::featurize_split(&scrambled, &train_idx, test_idx, &cfg).unwrap();
        assert_eq!(real.feature_len, redone.feature_len);
        assert_eq!(real.train, redone.train);
    }

    #[test]
    fn protocol_string_round_trip() {
        assert_eq!("kfold10".parse::<Protocol>().unwrap(), Protocol::KFold(10));
        assert_eq!("loso".parse::<Protocol>().unwrap(), Protocol::Loso);
        assert!("xfold".parse::<Protocol>().is_err());
        let json = serde_json::to_string(&Protocol::KFold(10)).unwrap();
        assert_eq!(json, "\"kfold10\"");
        let back: Protocol = serde_json::from_str(&json).unwrap();
        assert_eq!(back, Protocol::KFold(10));
    }

    #[test]
    fn spectrum_matches_naive_dft_and_locates_tones() {
        // Independent O(n²) DFT as the oracle for the FFT-backed spectrum.
        let naive = |x: &[f64], fs: f64| -> (Vec<f64>, Vec<f64>) {
            let n = x.len();
            let mean = x.iter().sum::<f64>() / n as f64;
            let bins = n / 2 + 1;
            let mut freqs = Vec::with_capacity(bins);
            let mut mags = Vec::with_capacity(bins);
            for k in 0..bins {
                let (mut re, mut im) = (0.0, 0.0);
                for (i, &v) in x.iter().enumerate() {
                    let ang = -std::f64::consts::TAU * k as f64 * i as f64 / n as f64;
                    re += (v - mean) * ang.cos();
                    im += (v - mean) * ang.sin();
                }
                freqs.push(k as f64 * fs / n as f64);
                mags.push((re * re + im * im).sqrt());
            }
            (freqs, mags)
        };

        let fs = SAMPLE_RATE_HZ;
        let tone_20: Vec<f64> = (0..TRACE_LEN)
            .map(|i| 0.3 + (std::f64::consts::TAU * 20.0 * i as f64 / fs).sin())
            .collect();
        let (freqs, mags) = spectrum_of(&tone_20, fs);
        assert_eq!(freqs.len(), 301);
        assert_eq!(*freqs.last().unwrap(), 50.0);
        let peak = mags
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(freqs[peak], 20.0);

        let (_, naive_mags) = naive(&tone_20, fs);
        for (a, b) in mags.iter().zip(&naive_mags) {
            assert!((a - b).abs() < 1e-6 * (1.0 + b), "{a} vs {b}");
        }

        // Continuous 120 Hz and 60 Hz tones sampled at 100 Hz fold to
        // 20 Hz and 40 Hz.
        for (carrier, alias) in [(120.0, 20.0), (60.0, 40.0)] {
            let x: Vec<f64> = (0..TRACE_LEN)
                .map(|i| (std::f64::consts::TAU * carrier * i as f64 / fs).sin())
                .collect();
            let (freqs, mags) = spectrum_of(&x, fs);
            let peak = mags
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            assert_eq!(freqs[peak], alias, "carrier {carrier}");
        }
    }

    #[test]
    fn ablation_is_deterministic() {
        let ds = small_dataset(41);
        let base = PipelineConfig::default();
        let rows1 = ablation_run(&ds, &base, 4, 2).unwrap();
        let rows2 = ablation_run(&ds, &base, 4, 2).unwrap();
        assert_eq!(rows1.len(), 8);
        assert_eq!(rows1, rows2);

        // The toggles map onto the expected configurations.
        let off = rows1
            .iter()
            .find(|r| !r.toggles.denoise && r.toggles.standardize)
            .unwrap();
        assert_eq!(off.report.fold_accuracies.len(), 4);
    }
}
