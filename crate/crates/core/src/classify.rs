//! K-nearest-neighbor classification over fixed-length feature vectors.
//!
//! Training stores the data verbatim (lazy learner). Prediction ranks all
//! training rows by Euclidean distance with a fully deterministic
//! tie-breaking chain so confusion matrices reproduce bit-for-bit:
//! equal distances prefer the lower training-row index; equal vote counts
//! prefer the smaller summed neighbor distance, then the lower label.

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;
use crate::types::{GestureLabel, NUM_GESTURES};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("k must be ≥ 1")]
    KTooSmall,
    #[error("k = {k} exceeds training rows = {rows}")]
    KTooLarge { k: usize, rows: usize },
    #[error("non-finite feature value in row {row}")]
    NonFinite { row: usize },
    #[error("model JSON: {0}")]
    BadModelJson(#[from] serde_json::Error),
    #[error("model format version {found} unsupported (expected {MODEL_FORMAT_VERSION})")]
    UnsupportedVersion { found: u32 },
}

/// Immutable trained model: row-major feature matrix plus per-row labels.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel<T> {
    k: usize,
    feature_len: usize,
    labels: Vec<GestureLabel>,
    values: Vec<T>,
}

/// Predicted label plus the per-label counts among the k neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: GestureLabel,
    pub votes: [usize; NUM_GESTURES],
}

#[derive(Serialize, Deserialize)]
struct ModelFile<T> {
    version: u32,
    k: usize,
    feature_len: usize,
    labels: Vec<GestureLabel>,
    values: Vec<T>,
}

impl<T: Real> KnnModel<T> {
    pub fn train(
        features: &[Vec<T>],
        labels: &[GestureLabel],
        k: usize,
    ) -> Result<KnnModel<T>, ClassifyError> {
        if features.is_empty() {
            return Err(ClassifyError::EmptyTrainingSet);
        }
        if features.len() != labels.len() {
            return Err(ClassifyError::ShapeMismatch(format!(
                "{} feature rows vs {} labels",
                features.len(),
                labels.len()
            )));
        }
        if k == 0 {
            return Err(ClassifyError::KTooSmall);
        }
        if k > features.len() {
            return Err(ClassifyError::KTooLarge {
                k,
                rows: features.len(),
            });
        }
        let feature_len = features[0].len();
        if feature_len == 0 {
            return Err(ClassifyError::ShapeMismatch("zero-length features".into()));
        }
        let mut values = Vec::with_capacity(features.len() * feature_len);
        for (row, f) in features.iter().enumerate() {
            if f.len() != feature_len {
                return Err(ClassifyError::ShapeMismatch(format!(
                    "row {row} has length {}, expected {feature_len}",
                    f.len()
                )));
            }
            if f.iter().any(|v| !v.is_finite()) {
                return Err(ClassifyError::NonFinite { row });
            }
            values.extend_from_slice(f);
        }
        Ok(KnnModel {
            k,
            feature_len,
            labels: labels.to_vec(),
            values,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn feature_len(&self) -> usize {
        self.feature_len
    }

    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[GestureLabel] {
        &self.labels
    }

    fn row(&self, idx: usize) -> &[T] {
        &self.values[idx * self.feature_len..(idx + 1) * self.feature_len]
    }

    pub fn predict(&self, query: &[T]) -> Result<Prediction, ClassifyError> {
        if query.len() != self.feature_len {
            return Err(ClassifyError::ShapeMismatch(format!(
                "query length {} vs model feature length {}",
                query.len(),
                self.feature_len
            )));
        }
        if query.iter().any(|v| !v.is_finite()) {
            return Err(ClassifyError::NonFinite { row: 0 });
        }

        let mut ranked: Vec<(T, usize)> = (0..self.rows())
            .map(|idx| {
                let dist = self
                    .row(idx)
                    .iter()
                    .zip(query)
                    .map(|(&r, &q)| (r - q) * (r - q))
                    .sum::<T>()
                    .sqrt();
                (dist, idx)
            })
            .collect();
        ranked.sort_unstable_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .expect("finite distances")
                .then(a.1.cmp(&b.1))
        });

        let mut votes = [0usize; NUM_GESTURES];
        let mut summed = [T::zero(); NUM_GESTURES];
        for &(dist, idx) in ranked.iter().take(self.k) {
            let li = self.labels[idx].index();
            votes[li] += 1;
            summed[li] += dist;
        }

        let mut best = None;
        for li in 0..NUM_GESTURES {
            if votes[li] == 0 {
                continue;
            }
            best = match best {
                None => Some(li),
                Some(cur) => {
                    if votes[li] > votes[cur]
                        || (votes[li] == votes[cur] && summed[li] < summed[cur])
                    {
                        Some(li)
                    } else {
                        Some(cur)
                    }
                }
            };
        }
        let label = GestureLabel::from_index(best.expect("k ≥ 1 guarantees a vote"))
            .expect("index within label range");
        Ok(Prediction { label, votes })
    }
}

impl<T: Real + Serialize> KnnModel<T> {
    /// Versioned JSON snapshot of the model.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ModelFile {
            version: MODEL_FORMAT_VERSION,
            k: self.k,
            feature_len: self.feature_len,
            labels: self.labels.clone(),
            values: self.values.clone(),
        })
        .expect("model serializes")
    }
}

impl<T: Real + DeserializeOwned> KnnModel<T> {
    pub fn from_json(json: &str) -> Result<KnnModel<T>, ClassifyError> {
        let file: ModelFile<T> = serde_json::from_str(json)?;
        if file.version != MODEL_FORMAT_VERSION {
            return Err(ClassifyError::UnsupportedVersion {
                found: file.version,
            });
        }
        if file.labels.is_empty() {
            return Err(ClassifyError::EmptyTrainingSet);
        }
        if file.feature_len == 0 || file.values.len() != file.labels.len() * file.feature_len {
            return Err(ClassifyError::ShapeMismatch(format!(
                "{} values vs {} rows × {} features",
                file.values.len(),
                file.labels.len(),
                file.feature_len
            )));
        }
        if file.k == 0 {
            return Err(ClassifyError::KTooSmall);
        }
        if file.k > file.labels.len() {
            return Err(ClassifyError::KTooLarge {
                k: file.k,
                rows: file.labels.len(),
            });
        }
        if let Some(row) = file
            .values
            .chunks(file.feature_len)
            .position(|r| r.iter().any(|v| !v.is_finite()))
        {
            return Err(ClassifyError::NonFinite { row });
        }
        Ok(KnnModel {
            k: file.k,
            feature_len: file.feature_len,
            labels: file.labels,
            values: file.values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use GestureLabel::{A, B, C};

    #[test]
    fn single_sample_model() {
        let model = KnnModel::train(&[vec![1.0, 2.0]], &[C], 1).unwrap();
        let p = model.predict(&[1.0, 2.0]).unwrap();
        assert_eq!(p.label, C);
        assert_eq!(p.votes[C.index()], 1);
    }

    #[test]
    fn shape_and_k_validation() {
        assert!(matches!(
            KnnModel::<f64>::train(&[], &[], 1),
            Err(ClassifyError::EmptyTrainingSet)
        ));
        assert!(matches!(
            KnnModel::train(&[vec![1.0], vec![1.0, 2.0]], &[A, B], 1),
            Err(ClassifyError::ShapeMismatch(_))
        ));
        assert!(matches!(
            KnnModel::train(&[vec![1.0]], &[A], 2),
            Err(ClassifyError::KTooLarge { k: 2, rows: 1 })
        ));
        assert!(matches!(
            KnnModel::train(&[vec![1.0]], &[A], 0),
            Err(ClassifyError::KTooSmall)
        ));
        assert!(matches!(
            KnnModel::train(&[vec![f64::NAN]], &[A], 1),
            Err(ClassifyError::NonFinite { row: 0 })
        ));
        let model = KnnModel::train(&[vec![1.0, 2.0]], &[A], 1).unwrap();
        assert!(matches!(
            model.predict(&[1.0]),
            Err(ClassifyError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn nearest_cluster_wins() {
        let model = KnnModel::train(&[vec![0.1], vec![5.0]], &[A, B], 1).unwrap();
        assert_eq!(model.predict(&[0.0]).unwrap().label, A);
        assert_eq!(model.predict(&[4.9]).unwrap().label, B);
    }

    #[test]
    fn resubstitution_is_exact_at_k1() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let features: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let labels: Vec<GestureLabel> = (0..40)
            .map(|i| GestureLabel::from_index(i % 8).unwrap())
            .collect();
        let model = KnnModel::train(&features, &labels, 1).unwrap();
        for (f, l) in features.iter().zip(&labels) {
            assert_eq!(model.predict(f).unwrap().label, *l);
        }
    }

    #[test]
    fn uniform_scaling_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let features: Vec<Vec<f64>> = (0..24)
            .map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let labels: Vec<GestureLabel> = (0..24)
            .map(|i| GestureLabel::from_index(i % 8).unwrap())
            .collect();
        let model = KnnModel::train(&features, &labels, 5).unwrap();

        let scaled: Vec<Vec<f64>> = features
            .iter()
            .map(|f| f.iter().map(|v| v * 7.25).collect())
            .collect();
        let model_scaled = KnnModel::train(&scaled, &labels, 5).unwrap();

        for _ in 0..20 {
            let q: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let qs: Vec<f64> = q.iter().map(|v| v * 7.25).collect();
            assert_eq!(
                model.predict(&q).unwrap().label,
                model_scaled.predict(&qs).unwrap().label
            );
        }
    }

    #[test]
    fn distance_ties_prefer_lower_row_index() {
        // Three identical rows; k = 2 must pick rows 0 and 1.
        let model = KnnModel::train(&[vec![1.0], vec![1.0], vec![1.0]], &[A, B, C], 2).unwrap();
        let p = model.predict(&[1.0]).unwrap();
        assert_eq!(p.votes, [1, 1, 0, 0, 0, 0, 0, 0]);
        // Votes tie 1–1 with equal summed distance 0 → lowest label.
        assert_eq!(p.label, A);
    }

    #[test]
    fn vote_ties_prefer_smaller_summed_distance() {
        // k = 2: one neighbor per class, B strictly closer.
        let model = KnnModel::train(&[vec![3.0], vec![0.5]], &[A, B], 2).unwrap();
        let p = model.predict(&[0.0]).unwrap();
        assert_eq!(p.votes, [1, 1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(p.label, B);
    }

    #[test]
    fn equal_everything_prefers_lower_label() {
        // Symmetric rows: both at distance 1, B stored first.
        let model = KnnModel::train(&[vec![1.0], vec![-1.0]], &[B, A], 2).unwrap();
        let p = model.predict(&[0.0]).unwrap();
        assert_eq!(p.label, A);
    }

    #[test]
    fn json_round_trip_and_version_guard() {
        let model = KnnModel::train(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[A, B], 1).unwrap();
        let json = model.to_json();
        assert!(json.contains("\"version\":1"));
        let back: KnnModel<f64> = KnnModel::from_json(&json).unwrap();
        assert_eq!(back, model);

        let bumped = json.replace("\"version\":1", "\"version\":9");
        assert!(matches!(
            KnnModel::<f64>::from_json(&bumped),
            Err(ClassifyError::UnsupportedVersion { found: 9 })
        ));

        let truncated = json.replace("\"feature_len\":2", "\"feature_len\":3");
        assert!(matches!(
            KnnModel::<f64>::from_json(&truncated),
            Err(ClassifyError::ShapeMismatch(_))
        ));
    }
}
