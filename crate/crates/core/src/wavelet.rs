//! Discrete wavelet transform, threshold selection, and denoising.
//!
//! The transform is the standard pyramidal DWT with symmetric (half-sample)
//! boundary extension. With filter length F, each analysis level convolves
//! the extended signal with the decomposition pair and keeps every second
//! sample: `coef[i] = conv(extend(x, F-1), filter)[2i + F]`, giving
//! `floor((n + F - 1) / 2)` coefficients per branch. Synthesis upsamples,
//! convolves with the time-reversed filters, and crops `F - 2` leading
//! samples; together the two directions reconstruct to machine precision.
//!
//! Threshold selection implements the four classic rules (`sqtwolog`,
//! `minimaxi`, `rigrsure`, `heursure`) on noise-normalized coefficients,
//! with the noise scale estimated as `median(|d1|) / 0.6745` from the
//! finest detail band.

use thiserror::Error;

use crate::scalar::Real;
use crate::types::Trace;

#[derive(Debug, Error)]
pub enum WaveletError {
    #[error("signal of {len} samples too short for {wavelet} level {level} (needs ≥ {needed})")]
    TooShort {
        len: usize,
        level: usize,
        needed: usize,
        wavelet: WaveletId,
    },
    #[error("levels must be ≥ 1")]
    NoLevels,
    #[error("coefficient shape mismatch at level {level}: expected {expected}, got {got}")]
    ShapeMismatch {
        level: usize,
        expected: usize,
        got: usize,
    },
    #[error("empty coefficient array")]
    Empty,
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("unknown wavelet {0:?}")]
    UnknownWavelet(String),
    #[error("unknown threshold rule {0:?}")]
    UnknownRule(String),
    #[error("unknown threshold mode {0:?}")]
    UnknownMode(String),
}

/// Conversion factor between the median absolute deviation of Gaussian
/// noise and its standard deviation.
pub const MAD_TO_SIGMA: f64 = 0.6745;

const HAAR_DEC_LO: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];

// Daubechies-4 decomposition low-pass, least-asymmetric ordering; obtained
// by spectral factorization of the degree-7 half-band filter. Sum is √2,
// energy is 1.
const DB4_DEC_LO: [f64; 8] = [
    -0.010597401785069032105,
    0.032883011666885199735,
    0.030841381835560763627,
    -0.187034811719093084080,
    -0.027983769416859854211,
    0.630880767929858907882,
    0.714846570552915647090,
    0.230377813308896500863,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveletId {
    Haar,
    Db4,
}

impl WaveletId {
    pub fn filter_len(self) -> usize {
        match self {
            WaveletId::Haar => 2,
            WaveletId::Db4 => 8,
        }
    }

    fn dec_lo_f64(self) -> &'static [f64] {
        match self {
            WaveletId::Haar => &HAAR_DEC_LO,
            WaveletId::Db4 => &DB4_DEC_LO,
        }
    }

    /// Decomposition filter pair. High-pass by quadrature mirror:
    /// `hi[i] = (-1)^i · lo[F-1-i]`.
    pub fn filters<T: Real>(self) -> (Vec<T>, Vec<T>) {
        let lo_f64 = self.dec_lo_f64();
        let f = lo_f64.len();
        let lo: Vec<T> = lo_f64.iter().map(|&c| T::from_f64_lossy(c)).collect();
        let hi: Vec<T> = (0..f)
            .map(|i| {
                let v = lo[f - 1 - i];
                if i % 2 == 0 {
                    v
                } else {
                    -v
                }
            })
            .collect();
        (lo, hi)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            WaveletId::Haar => "haar",
            WaveletId::Db4 => "db4",
        }
    }
}

impl std::fmt::Display for WaveletId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for WaveletId {
    type Err = WaveletError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "haar" => Ok(WaveletId::Haar),
            "db4" => Ok(WaveletId::Db4),
            other => Err(WaveletError::UnknownWavelet(other.to_string())),
        }
    }
}

/// Boundary handling for the transform. Only symmetric (half-sample
/// reflection) is implemented; the field exists so serialized decompositions
/// stay self-describing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    Symmetric,
}

/// Multilevel DWT coefficients. `details[0]` is the finest band (level 1),
/// the last entry is the coarsest; `approx` pairs with that coarsest level.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDecomposition<T> {
    pub approx: Vec<T>,
    pub details: Vec<Vec<T>>,
    pub wavelet_id: WaveletId,
    pub original_length: usize,
    pub boundary_mode: BoundaryMode,
}

impl<T> WaveletDecomposition<T> {
    pub fn levels(&self) -> usize {
        self.details.len()
    }
}

/// Coefficient count per level for a signal of `n` samples: index 0 is
/// level 1. Each level holds `floor((len + F - 1) / 2)` coefficients of the
/// previous level's approximation.
fn level_lengths(n: usize, filter_len: usize, levels: usize) -> Vec<usize> {
    let mut lens = Vec::with_capacity(levels);
    let mut cur = n;
    for _ in 0..levels {
        cur = (cur + filter_len - 1) / 2;
        lens.push(cur);
    }
    lens
}

/// Symmetric half-sample extension by `margin` samples on each side:
/// `[x[m-1] .. x[0] | x | x[n-1] .. x[n-m]]`. Requires `margin < n`.
fn symmetric_extend<T: Real>(x: &[T], margin: usize) -> Vec<T> {
    let n = x.len();
    let mut ext = Vec::with_capacity(n + 2 * margin);
    for i in (0..margin).rev() {
        ext.push(x[i]);
    }
    ext.extend_from_slice(x);
    for i in 0..margin {
        ext.push(x[n - 1 - i]);
    }
    ext
}

fn analysis_step<T: Real>(x: &[T], lo: &[T], hi: &[T]) -> (Vec<T>, Vec<T>) {
    let n = x.len();
    let f = lo.len();
    let out_len = (n + f - 1) / 2;
    let ext = symmetric_extend(x, f - 1);
    let mut approx = Vec::with_capacity(out_len);
    let mut detail = Vec::with_capacity(out_len);
    for i in 0..out_len {
        let base = 2 * i + f;
        let mut a = T::zero();
        let mut d = T::zero();
        for (j, (&l, &h)) in lo.iter().zip(hi.iter()).enumerate() {
            let v = ext[base - j];
            a += l * v;
            d += h * v;
        }
        approx.push(a);
        detail.push(d);
    }
    (approx, detail)
}

/// One synthesis level: upsample both branches, convolve with time-reversed
/// filters, crop `F - 2` leading samples, truncate to `out_len`.
fn synthesis_step<T: Real>(approx: &[T], detail: &[T], lo: &[T], hi: &[T], out_len: usize) -> Vec<T> {
    let l = approx.len();
    let f = lo.len();
    debug_assert!(out_len <= 2 * l + 2 - f, "target longer than synthesis supports");
    let full = 2 * l + f - 2;
    let mut y = vec![T::zero(); full];
    for i in 0..l {
        let (a, d) = (approx[i], detail[i]);
        for j in 0..f {
            // reversed filters: rec[j] = dec[f-1-j]
            y[2 * i + j] += lo[f - 1 - j] * a + hi[f - 1 - j] * d;
        }
    }
    y[(f - 2)..(f - 2 + out_len)].to_vec()
}

/// Multilevel forward transform with symmetric boundary extension.
pub fn dwt_forward<T: Real>(
    signal: &[T],
    wavelet_id: WaveletId,
    levels: usize,
) -> Result<WaveletDecomposition<T>, WaveletError> {
    if levels == 0 {
        return Err(WaveletError::NoLevels);
    }
    if let Some(idx) = signal.iter().position(|v| !v.is_finite()) {
        return Err(WaveletError::NonFinite(idx));
    }
    let (lo, hi) = wavelet_id.filters::<T>();
    let f = wavelet_id.filter_len();
    let mut cur = signal.to_vec();
    let mut details = Vec::with_capacity(levels);
    for level in 1..=levels {
        if cur.len() < f {
            return Err(WaveletError::TooShort {
                len: signal.len(),
                level,
                needed: f,
                wavelet: wavelet_id,
            });
        }
        let (a, d) = analysis_step(&cur, &lo, &hi);
        details.push(d);
        cur = a;
    }
    Ok(WaveletDecomposition {
        approx: cur,
        details,
        wavelet_id,
        original_length: signal.len(),
        boundary_mode: BoundaryMode::Symmetric,
    })
}

/// Inverse transform; reconstructs a signal of `original_length`.
pub fn dwt_inverse<T: Real>(decomp: &WaveletDecomposition<T>) -> Result<Vec<T>, WaveletError> {
    let levels = decomp.levels();
    if levels == 0 {
        return Err(WaveletError::NoLevels);
    }
    let f = decomp.wavelet_id.filter_len();
    let lens = level_lengths(decomp.original_length, f, levels);
    for (i, d) in decomp.details.iter().enumerate() {
        if d.len() != lens[i] {
            return Err(WaveletError::ShapeMismatch {
                level: i + 1,
                expected: lens[i],
                got: d.len(),
            });
        }
    }
    if decomp.approx.len() != lens[levels - 1] {
        return Err(WaveletError::ShapeMismatch {
            level: levels,
            expected: lens[levels - 1],
            got: decomp.approx.len(),
        });
    }
    let (lo, hi) = decomp.wavelet_id.filters::<T>();
    let mut cur = decomp.approx.clone();
    for level in (0..levels).rev() {
        let target = if level == 0 {
            decomp.original_length
        } else {
            lens[level - 1]
        };
        cur = synthesis_step(&cur, &decomp.details[level], &lo, &hi, target);
    }
    Ok(cur)
}

/// Noise scale from the finest detail band: `median(|d|) / 0.6745`.
pub fn estimate_noise_sigma<T: Real>(finest_detail: &[T]) -> Result<T, WaveletError> {
    if finest_detail.is_empty() {
        return Err(WaveletError::Empty);
    }
    let mut mags: Vec<T> = finest_detail.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite coefficients"));
    let n = mags.len();
    let median = if n % 2 == 1 {
        mags[n / 2]
    } else {
        (mags[n / 2 - 1] + mags[n / 2]) / T::from_f64_lossy(2.0)
    };
    Ok(median / T::from_f64_lossy(MAD_TO_SIGMA))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdRule {
    Rigrsure,
    Heursure,
    Sqtwolog,
    Minimaxi,
}

impl ThresholdRule {
    pub fn as_str(self) -> &'static str {
        match self {
            ThresholdRule::Rigrsure => "rigrsure",
            ThresholdRule::Heursure => "heursure",
            ThresholdRule::Sqtwolog => "sqtwolog",
            ThresholdRule::Minimaxi => "minimaxi",
        }
    }
}

impl std::fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ThresholdRule {
    type Err = WaveletError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rigrsure" => Ok(ThresholdRule::Rigrsure),
            "heursure" => Ok(ThresholdRule::Heursure),
            "sqtwolog" => Ok(ThresholdRule::Sqtwolog),
            "minimaxi" => Ok(ThresholdRule::Minimaxi),
            other => Err(WaveletError::UnknownRule(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    Soft,
    Hard,
}

impl ThresholdMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ThresholdMode::Soft => "soft",
            ThresholdMode::Hard => "hard",
        }
    }
}

impl std::fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ThresholdMode {
    type Err = WaveletError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "soft" => Ok(ThresholdMode::Soft),
            "hard" => Ok(ThresholdMode::Hard),
            other => Err(WaveletError::UnknownMode(other.to_string())),
        }
    }
}

/// Threshold for one coefficient band.
///
/// `sigma` is the noise scale (coefficients are normalized by it internally)
/// and `n` the sample count the rule reasons about; band-wise denoising
/// passes the band's coefficient count. `sigma ≤ 0` means a noiseless band
/// and yields threshold 0.
///
/// Rules:
/// - sqtwolog: `σ·√(2 ln n)`
/// - minimaxi: `σ·(0.3936 + 0.1829·log2 n)` for n > 32, else 0
/// - rigrsure: `σ·√(s[k*])` where `s` are the ascending squared normalized
///   coefficients and `k*` minimizes the SURE risk
///   `(n − 2k + Σ_{i≤k} s_i + (n−k)·s_k) / n`
/// - heursure: sqtwolog when the normalized excess energy
///   `(Σ s_i − n)/n` falls below `(log2 n)^1.5/√n`, otherwise
///   `min(rigrsure, sqtwolog)`
pub fn threshold_value<T: Real>(
    coeffs: &[T],
    rule: ThresholdRule,
    sigma: T,
    n: usize,
) -> Result<T, WaveletError> {
    if n == 0 {
        return Err(WaveletError::Empty);
    }
    if sigma <= T::zero() {
        return Ok(T::zero());
    }
    let nf = T::from_f64_lossy(n as f64);
    match rule {
        ThresholdRule::Sqtwolog => Ok(sigma * (T::from_f64_lossy(2.0) * nf.ln()).sqrt()),
        ThresholdRule::Minimaxi => {
            if n > 32 {
                let c0 = T::from_f64_lossy(0.3936);
                let c1 = T::from_f64_lossy(0.1829);
                Ok(sigma * (c0 + c1 * nf.log2()))
            } else {
                Ok(T::zero())
            }
        }
        ThresholdRule::Rigrsure => sure_threshold(coeffs, sigma, n),
        ThresholdRule::Heursure => {
            if coeffs.is_empty() {
                return Err(WaveletError::Empty);
            }
            let energy: T = coeffs.iter().map(|&c| (c / sigma) * (c / sigma)).sum();
            let eta = (energy - nf) / nf;
            let crit = nf.log2().powf(T::from_f64_lossy(1.5)) / nf.sqrt();
            let universal = threshold_value(coeffs, ThresholdRule::Sqtwolog, sigma, n)?;
            if eta < crit {
                Ok(universal)
            } else {
                let sure = sure_threshold(coeffs, sigma, n)?;
                Ok(sure.min(universal))
            }
        }
    }
}

fn sure_threshold<T: Real>(coeffs: &[T], sigma: T, n: usize) -> Result<T, WaveletError> {
    if coeffs.is_empty() {
        return Err(WaveletError::Empty);
    }
    let nf = T::from_f64_lossy(n as f64);
    let mut s: Vec<T> = coeffs.iter().map(|&c| (c / sigma) * (c / sigma)).collect();
    s.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite coefficients"));
    let mut best_s = s[0];
    let mut best_risk = T::infinity();
    let mut cum = T::zero();
    for (i, &sk) in s.iter().enumerate() {
        let k = T::from_f64_lossy((i + 1) as f64);
        cum += sk;
        let risk = (nf - T::from_f64_lossy(2.0) * k + cum + (nf - k) * sk) / nf;
        if risk < best_risk {
            best_risk = risk;
            best_s = sk;
        }
    }
    Ok(sigma * best_s.sqrt())
}

/// Shrink (`soft`) or keep-or-kill (`hard`) coefficients against λ.
/// Hard keeps strictly-greater magnitudes only.
pub fn apply_threshold<T: Real>(coeffs: &[T], lambda: T, mode: ThresholdMode) -> Vec<T> {
    coeffs
        .iter()
        .map(|&c| match mode {
            ThresholdMode::Soft => {
                let shrunk = c.abs() - lambda;
                if shrunk > T::zero() {
                    c.signum() * shrunk
                } else {
                    T::zero()
                }
            }
            ThresholdMode::Hard => {
                if c.abs() > lambda {
                    c
                } else {
                    T::zero()
                }
            }
        })
        .collect()
}

/// Full denoising configuration. `level_dependent` thresholds each detail
/// band with its own λ; otherwise one λ is computed from all detail
/// coefficients pooled. The approximation band is never thresholded.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DenoiseConfig {
    pub wavelet_id: WaveletId,
    pub levels: usize,
    pub rule: ThresholdRule,
    pub mode: ThresholdMode,
    pub level_dependent: bool,
}

impl Default for DenoiseConfig {
    fn default() -> Self {
        DenoiseConfig {
            wavelet_id: WaveletId::Db4,
            levels: 4,
            rule: ThresholdRule::Rigrsure,
            mode: ThresholdMode::Soft,
            level_dependent: true,
        }
    }
}

/// Wavelet-denoise a signal: decompose, threshold details with a noise
/// scale estimated from the finest band, reconstruct. Output length equals
/// input length. Depth must satisfy `n / 2^levels ≥ filter length`.
pub fn denoise_signal<T: Real>(signal: &[T], config: &DenoiseConfig) -> Result<Vec<T>, WaveletError> {
    if config.levels == 0 {
        return Err(WaveletError::NoLevels);
    }
    let f = config.wavelet_id.filter_len();
    if signal.len() >> config.levels < f {
        return Err(WaveletError::TooShort {
            len: signal.len(),
            level: config.levels,
            needed: f << config.levels,
            wavelet: config.wavelet_id,
        });
    }
    let mut decomp = dwt_forward(signal, config.wavelet_id, config.levels)?;
    let sigma = estimate_noise_sigma(&decomp.details[0])?;
    if config.level_dependent {
        for detail in decomp.details.iter_mut() {
            let lambda = threshold_value(detail, config.rule, sigma, detail.len())?;
            *detail = apply_threshold(detail, lambda, config.mode);
        }
    } else {
        let pooled: Vec<T> = decomp.details.iter().flatten().copied().collect();
        let lambda = threshold_value(&pooled, config.rule, sigma, pooled.len())?;
        for detail in decomp.details.iter_mut() {
            *detail = apply_threshold(detail, lambda, config.mode);
        }
    }
    dwt_inverse(&decomp)
}

/// Trace-level denoising; metadata and sample rate pass through.
pub fn denoise(trace: &Trace, config: &DenoiseConfig) -> Result<Trace, WaveletError> {
    Ok(Trace {
        samples: denoise_signal(&trace.samples, config)?,
        sample_rate: trace.sample_rate,
        meta: trace.meta.clone(),
    })
}
