//! Length normalization and standardization of trimmed segments.
//!
//! Zero-padding to a common length is the production path. Dynamic time
//! warping is also provided, both as a distance and as a pairwise aligner,
//! so the template-warping featurizer can be compared against padding.

use thiserror::Error;

use crate::scalar::Real;

/// Standard deviations at or below this are treated as degenerate (flat).
pub const FLAT_SD_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AlignError {
    #[error("target length {target} shorter than segment length {len}")]
    TargetTooShort { target: usize, len: usize },
    #[error("vector of {0} samples too short to standardize (needs ≥ 2)")]
    TooShort(usize),
    #[error("degenerate flat vector: sample SD {0} ≤ {FLAT_SD_FLOOR}")]
    DegenerateFlat(f64),
    #[error("empty sequence")]
    Empty,
}

/// Append zeros up to `target_len`.
pub fn zero_pad<T: Real>(segment: &[T], target_len: usize) -> Result<Vec<T>, AlignError> {
    if target_len < segment.len() {
        return Err(AlignError::TargetTooShort {
            target: target_len,
            len: segment.len(),
        });
    }
    let mut out = segment.to_vec();
    out.resize(target_len, T::zero());
    Ok(out)
}

/// Mean and sample standard deviation (n−1 divisor).
pub fn mean_sd<T: Real>(values: &[T]) -> (T, T) {
    let n = T::from_f64_lossy(values.len() as f64);
    let mean = values.iter().copied().sum::<T>() / n;
    let ss: T = values
        .iter()
        .map(|&v| (v - mean) * (v - mean))
        .sum::<T>();
    let sd = (ss / (n - T::one())).sqrt();
    (mean, sd)
}

/// Standardize to zero mean and unit sample SD.
pub fn zscore<T: Real>(values: &[T]) -> Result<Vec<T>, AlignError> {
    if values.len() < 2 {
        return Err(AlignError::TooShort(values.len()));
    }
    let (mean, sd) = mean_sd(values);
    if sd <= T::from_f64_lossy(FLAT_SD_FLOOR) {
        return Err(AlignError::DegenerateFlat(sd.to_f64().unwrap_or(0.0)));
    }
    Ok(values.iter().map(|&v| (v - mean) / sd).collect())
}

/// Optimal warping result: cumulative |a_i − b_j| cost plus the path of
/// index pairs, starting at (0,0) and ending at (n−1, m−1) with steps in
/// {(1,0),(0,1),(1,1)}.
#[derive(Debug, Clone, PartialEq)]
pub struct DtwResult<T> {
    pub distance: T,
    pub path: Vec<(usize, usize)>,
}

fn dtw_matrix<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    let (n, m) = (a.len(), b.len());
    let w = m + 1;
    let mut d = vec![T::infinity(); (n + 1) * w];
    d[0] = T::zero();
    for i in 1..=n {
        for j in 1..=m {
            let cost = (a[i - 1] - b[j - 1]).abs();
            let best = d[(i - 1) * w + j - 1]
                .min(d[(i - 1) * w + j])
                .min(d[i * w + j - 1]);
            d[i * w + j] = cost + best;
        }
    }
    d
}

/// Unconstrained DTW with absolute-difference local cost and path recovery.
/// Ties in the backtrack prefer the diagonal, then the `a`-advancing step.
pub fn dtw_distance<T: Real>(a: &[T], b: &[T]) -> Result<DtwResult<T>, AlignError> {
    if a.is_empty() || b.is_empty() {
        return Err(AlignError::Empty);
    }
    let (n, m) = (a.len(), b.len());
    let w = m + 1;
    let d = dtw_matrix(a, b);

    let mut path = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    while i > 1 || j > 1 {
        path.push((i - 1, j - 1));
        let diag = if i > 1 && j > 1 {
            d[(i - 1) * w + j - 1]
        } else {
            T::infinity()
        };
        let up = if i > 1 { d[(i - 1) * w + j] } else { T::infinity() };
        let left = if j > 1 { d[i * w + j - 1] } else { T::infinity() };
        if diag <= up && diag <= left {
            i -= 1;
            j -= 1;
        } else if up <= left {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    path.push((0, 0));
    path.reverse();
    Ok(DtwResult {
        distance: d[n * w + m],
        path,
    })
}

/// DTW cost only, skipping path recovery (two-row recurrence).
pub fn dtw_cost<T: Real>(a: &[T], b: &[T]) -> Result<T, AlignError> {
    if a.is_empty() || b.is_empty() {
        return Err(AlignError::Empty);
    }
    let m = b.len();
    let mut prev = vec![T::infinity(); m + 1];
    let mut cur = vec![T::infinity(); m + 1];
    prev[0] = T::zero();
    for &av in a {
        cur[0] = T::infinity();
        for j in 1..=m {
            let cost = (av - b[j - 1]).abs();
            cur[j] = cost + prev[j - 1].min(prev[j]).min(cur[j - 1]);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[m])
}

/// Expand both sequences along the optimal path; outputs share the path's
/// length (≤ n + m − 1).
pub fn dtw_align<T: Real>(a: &[T], b: &[T]) -> Result<(Vec<T>, Vec<T>), AlignError> {
    let result = dtw_distance(a, b)?;
    let mut wa = Vec::with_capacity(result.path.len());
    let mut wb = Vec::with_capacity(result.path.len());
    for &(i, j) in &result.path {
        wa.push(a[i]);
        wb.push(b[j]);
    }
    Ok((wa, wb))
}
