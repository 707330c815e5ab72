//! Domain types for photodiode gesture traces.
//!
//! A trace is the sampled output voltage of a single photodiode while one
//! hand gesture is performed above the desk. The reference capture setup
//! records 6 s at 100 Hz, i.e. 600 samples per trace.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Samples per trace in the reference capture setup.
pub const TRACE_LEN: usize = 600;
/// Sampling rate of the reference capture setup, Hz.
pub const SAMPLE_RATE_HZ: f64 = 100.0;
/// Number of distinct gesture classes.
pub const NUM_GESTURES: usize = 8;

#[derive(Debug, Error)]
pub enum TypesError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset mixes sample rates ({0} Hz vs {1} Hz)")]
    MixedSampleRate(f64, f64),
    #[error("unknown gesture label {0:?}")]
    UnknownGesture(String),
    #[error("unknown light source {0:?}")]
    UnknownSource(String),
    #[error("unknown lighting state {0:?}")]
    UnknownLighting(String),
}

/// One of the eight hand gestures, labelled `a` through `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GestureLabel {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

impl GestureLabel {
    pub const ALL: [GestureLabel; NUM_GESTURES] = [
        GestureLabel::A,
        GestureLabel::B,
        GestureLabel::C,
        GestureLabel::D,
        GestureLabel::E,
        GestureLabel::F,
        GestureLabel::G,
        GestureLabel::H,
    ];

    /// Zero-based class index, `a` is 0 and `h` is 7.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(idx: usize) -> Option<GestureLabel> {
        Self::ALL.get(idx).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GestureLabel::A => "a",
            GestureLabel::B => "b",
            GestureLabel::C => "c",
            GestureLabel::D => "d",
            GestureLabel::E => "e",
            GestureLabel::F => "f",
            GestureLabel::G => "g",
            GestureLabel::H => "h",
        }
    }
}

impl fmt::Display for GestureLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GestureLabel {
    type Err = TypesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| TypesError::UnknownGesture(s.to_string()))
    }
}

/// Emitter driving the scene: an infrared LED or a visible-light LED.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LightSource {
    Infrared,
    Visible,
}

impl LightSource {
    pub fn as_str(self) -> &'static str {
        match self {
            LightSource::Infrared => "infrared",
            LightSource::Visible => "visible",
        }
    }
}

impl fmt::Display for LightSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LightSource {
    type Err = TypesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "infrared" | "ir" => Ok(LightSource::Infrared),
            "visible" | "vis" => Ok(LightSource::Visible),
            other => Err(TypesError::UnknownSource(other.to_string())),
        }
    }
}

/// Whether the room's fluorescent ceiling lights were on during capture.
/// Mains-powered lights leak 120 Hz and 60 Hz flicker into the photodiode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lighting {
    On,
    Off,
}

impl Lighting {
    pub fn as_str(self) -> &'static str {
        match self {
            Lighting::On => "on",
            Lighting::Off => "off",
        }
    }
}

impl fmt::Display for Lighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Lighting {
    type Err = TypesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "on" => Ok(Lighting::On),
            "off" => Ok(Lighting::Off),
            other => Err(TypesError::UnknownLighting(other.to_string())),
        }
    }
}

/// Capture conditions and provenance for a single trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    /// 1-based participant id.
    pub subject_id: u32,
    pub gesture: GestureLabel,
    /// Emitter-to-hand distance in centimetres.
    pub distance_cm: f64,
    pub source: LightSource,
    pub lighting: Lighting,
    /// Seed of the per-trace random stream that generated the samples.
    pub seed: u64,
}

impl TraceMeta {
    /// Directory-friendly scenario key, e.g. `infrared_20cm_on`.
    pub fn scenario_key(&self) -> String {
        format!(
            "{}_{}cm_{}",
            self.source,
            format_distance(self.distance_cm),
            self.lighting
        )
    }
}

/// Format a distance for path components: integral values lose the `.0`.
pub fn format_distance(d: f64) -> String {
    if d == d.trunc() {
        format!("{}", d as i64)
    } else {
        format!("{}", d)
    }
}

/// A single sampled photodiode trace with its capture metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    /// Output voltage per sample, volts.
    pub samples: Vec<f64>,
    /// Sampling rate, Hz.
    pub sample_rate: f64,
    pub meta: TraceMeta,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }
}

/// Outcome of structural validation of a trace. Violations are phrased for
/// humans; an empty list means the trace matches the reference capture shape.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check a trace against the reference capture shape: 600 samples, 100 Hz,
/// all values finite, positive distance. Never panics; every deviation is
/// reported as a violation string.
pub fn validate_trace(trace: &Trace) -> ValidationReport {
    let mut violations = Vec::new();
    if trace.samples.len() != TRACE_LEN {
        violations.push(format!(
            "expected {} samples, got {}",
            TRACE_LEN,
            trace.samples.len()
        ));
    }
    if trace.sample_rate != SAMPLE_RATE_HZ {
        violations.push(format!(
            "expected {} Hz sample rate, got {}",
            SAMPLE_RATE_HZ, trace.sample_rate
        ));
    }
    let bad = trace.samples.iter().filter(|v| !v.is_finite()).count();
    if bad > 0 {
        violations.push(format!("{bad} non-finite sample(s)"));
    }
    if !(trace.meta.distance_cm > 0.0) {
        violations.push(format!(
            "distance must be positive, got {}",
            trace.meta.distance_cm
        ));
    }
    ValidationReport { violations }
}

/// An ordered collection of traces plus an integrity checksum.
///
/// The checksum is a SHA-256 over every trace's metadata and samples in
/// stored order, so two datasets with the same checksum hold bit-identical
/// signals. Trace order is part of the identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    pub traces: Vec<Trace>,
    pub checksum: String,
}

impl Dataset {
    /// Build a dataset from traces, computing the checksum. All traces must
    /// share one sample rate.
    pub fn from_traces(traces: Vec<Trace>) -> Result<Dataset, TypesError> {
        let first = traces.first().ok_or(TypesError::EmptyDataset)?;
        let rate = first.sample_rate;
        for t in &traces {
            if t.sample_rate != rate {
                return Err(TypesError::MixedSampleRate(rate, t.sample_rate));
            }
        }
        let checksum = checksum_traces(&traces);
        Ok(Dataset { traces, checksum })
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn labels(&self) -> Vec<GestureLabel> {
        self.traces.iter().map(|t| t.meta.gesture).collect()
    }

    /// Sorted unique subject ids.
    pub fn subjects(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.traces.iter().map(|t| t.meta.subject_id).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Trace counts per (scenario key, subject, gesture).
    pub fn counts(&self) -> BTreeMap<(String, u32, GestureLabel), usize> {
        let mut counts = BTreeMap::new();
        for t in &self.traces {
            *counts
                .entry((t.meta.scenario_key(), t.meta.subject_id, t.meta.gesture))
                .or_insert(0) += 1;
        }
        counts
    }
}

/// SHA-256 over trace metadata and raw sample bits, hex-encoded.
pub fn checksum_traces(traces: &[Trace]) -> String {
    let mut hasher = Sha256::new();
    for t in traces {
        hasher.update(t.meta.subject_id.to_le_bytes());
        hasher.update([t.meta.gesture.index() as u8]);
        hasher.update(t.meta.distance_cm.to_le_bytes());
        hasher.update([match t.meta.source {
            LightSource::Infrared => 0u8,
            LightSource::Visible => 1u8,
        }]);
        hasher.update([match t.meta.lighting {
            Lighting::On => 0u8,
            Lighting::Off => 1u8,
        }]);
        hasher.update(t.meta.seed.to_le_bytes());
        hasher.update(t.sample_rate.to_le_bytes());
        hasher.update((t.samples.len() as u64).to_le_bytes());
        for s in &t.samples {
            hasher.update(s.to_le_bytes());
        }
    }
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// A fixed-length feature vector ready for the classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> FeatureVector {
        FeatureVector { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
