//! Trace CSV and dataset directory I/O.
//!
//! One trace is a CSV with header `t_s,volts` and one row per sample. A
//! dataset is a directory tree `<root>/<source>_<distance>cm_<lighting>/
//! <subject>/<gesture>_<rep>.csv` plus a `manifest.json` at the root that
//! lists every file with its metadata and carries the dataset checksum.
//! Sample values are written with Rust's shortest round-trip float
//! formatting, so write → read reproduces bit-identical samples and the
//! checksum verifies.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{checksum_traces, Dataset, Trace, TraceMeta, TRACE_LEN};

pub const MANIFEST_VERSION: u32 = 1;
pub const TRACE_HEADER: &str = "t_s,volts";
pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: expected header {TRACE_HEADER:?}, got {found:?}")]
    BadHeader { path: String, found: String },
    #[error("{path} line {line}: {msg}")]
    BadRow {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    BadManifest {
        path: String,
        source: serde_json::Error,
    },
    #[error("manifest version {found} unsupported (expected {MANIFEST_VERSION})")]
    UnsupportedVersion { found: u32 },
    #[error("dataset checksum mismatch: manifest {expected}, recomputed {actual}")]
    ChecksumMismatch { expected: String, actual: String },
    #[error("{0}")]
    InvalidDataset(String),
}

fn file_err(path: &Path, source: std::io::Error) -> IoError {
    IoError::File {
        path: path.display().to_string(),
        source,
    }
}

/// Shortest decimal string that parses back to exactly the same f64.
pub fn format_volts(v: f64) -> String {
    format!("{v}")
}

/// Relative path of a trace inside a dataset directory.
/// `rep` is the 0-based repetition index within (scenario, subject, gesture).
pub fn trace_rel_path(meta: &TraceMeta, rep: usize) -> PathBuf {
    PathBuf::from(meta.scenario_key())
        .join(meta.subject_id.to_string())
        .join(format!("{}_{rep}.csv", meta.gesture))
}

pub fn write_trace_csv(path: &Path, trace: &Trace) -> Result<(), IoError> {
    let mut out = String::with_capacity(trace.samples.len() * 16);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for (i, v) in trace.samples.iter().enumerate() {
        let t = i as f64 / trace.sample_rate;
        out.push_str(&format_volts(t));
        out.push(',');
        out.push_str(&format_volts(*v));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| file_err(path, e))
}

/// Read just the sample column of a trace CSV, checking the header.
pub fn read_trace_samples(path: &Path) -> Result<Vec<f64>, IoError> {
    let text = fs::read_to_string(path).map_err(|e| file_err(path, e))?;
    let display = path.display().to_string();
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header.trim_end() != TRACE_HEADER {
        return Err(IoError::BadHeader {
            path: display,
            found: header.to_string(),
        });
    }
    let mut samples = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let (t, v) = (cols.next(), cols.next());
        let bad = |msg: String| IoError::BadRow {
            path: display.clone(),
            line: idx + 2,
            msg,
        };
        let v = v.ok_or_else(|| bad("expected two columns".into()))?;
        t.unwrap()
            .parse::<f64>()
            .map_err(|e| bad(format!("bad t_s: {e}")))?;
        samples.push(v.parse::<f64>().map_err(|e| bad(format!("bad volts: {e}")))?);
    }
    if samples.len() != TRACE_LEN {
        log::warn!(
            "{display}: {} samples (reference capture is {TRACE_LEN})",
            samples.len()
        );
    }
    Ok(samples)
}

pub fn read_trace_csv(path: &Path, sample_rate: f64, meta: TraceMeta) -> Result<Trace, IoError> {
    Ok(Trace {
        samples: read_trace_samples(path)?,
        sample_rate,
        meta,
    })
}

/// Dataset sidecar manifest: one entry per trace file, in dataset order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub sample_rate_hz: f64,
    pub checksum: String,
    pub traces: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    #[serde(flatten)]
    pub meta: TraceMeta,
}

/// Write every trace CSV plus `manifest.json` under `root`.
pub fn write_dataset(root: &Path, dataset: &Dataset) -> Result<(), IoError> {
    let sample_rate = match dataset.traces.first() {
        Some(t) => t.sample_rate,
        None => return Err(IoError::InvalidDataset("dataset is empty".into())),
    };
    let mut rep_counter: std::collections::HashMap<(String, u32, u8), usize> =
        std::collections::HashMap::new();
    let mut entries = Vec::with_capacity(dataset.traces.len());
    for trace in &dataset.traces {
        let key = (
            trace.meta.scenario_key(),
            trace.meta.subject_id,
            trace.meta.gesture.index() as u8,
        );
        let rep = rep_counter.entry(key).or_insert(0);
        let rel = trace_rel_path(&trace.meta, *rep);
        *rep += 1;

        let abs = root.join(&rel);
        if let Some(dir) = abs.parent() {
            fs::create_dir_all(dir).map_err(|e| file_err(dir, e))?;
        }
        write_trace_csv(&abs, trace)?;
        entries.push(ManifestEntry {
            path: rel.to_string_lossy().into_owned(),
            meta: trace.meta.clone(),
        });
    }
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        sample_rate_hz: sample_rate,
        checksum: dataset.checksum.clone(),
        traces: entries,
    };
    let path = root.join(MANIFEST_NAME);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(|e| file_err(&path, e))
}

/// Load a dataset directory via its manifest and verify the checksum.
pub fn read_dataset(root: &Path) -> Result<Dataset, IoError> {
    let manifest_path = root.join(MANIFEST_NAME);
    let text = fs::read_to_string(&manifest_path).map_err(|e| file_err(&manifest_path, e))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| IoError::BadManifest {
        path: manifest_path.display().to_string(),
        source: e,
    })?;
    if manifest.version != MANIFEST_VERSION {
        return Err(IoError::UnsupportedVersion {
            found: manifest.version,
        });
    }
    let mut traces = Vec::with_capacity(manifest.traces.len());
    for entry in &manifest.traces {
        traces.push(read_trace_csv(
            &root.join(&entry.path),
            manifest.sample_rate_hz,
            entry.meta.clone(),
        )?);
    }
    let actual = checksum_traces(&traces);
    if actual != manifest.checksum {
        return Err(IoError::ChecksumMismatch {
            expected: manifest.checksum,
            actual,
        });
    }
    Ok(Dataset {
        traces,
        checksum: actual,
    })
}
