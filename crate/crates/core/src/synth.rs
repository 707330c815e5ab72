//! Deterministic synthetic trace generator.
//!
//! Traces model a photodiode watching a hand above a desk:
//! `baseline + envelope·scale + flicker₁₂₀ + flicker₆₀ + white noise`.
//! The envelope scale follows measured reflected-power tables (log-log
//! interpolated over distance); mains flicker at 120 Hz and 60 Hz aliases
//! to 20 Hz and 40 Hz at the 100 Hz sampling rate. All randomness derives
//! from one dataset seed: each subject gets a persistent gain and tempo,
//! each repetition its own duration, onset, flicker phases, and noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::types::{
    Dataset, GestureLabel, LightSource, Lighting, Trace, TraceMeta, SAMPLE_RATE_HZ, TRACE_LEN,
};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("distance {0} cm outside the measured range [5, 35]")]
    OutOfRange(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown scenario preset {0:?}")]
    UnknownPreset(String),
    #[error(transparent)]
    Types(#[from] crate::types::TypesError),
}

/// Ambient/electronic noise floor, volts. Independent of the emitter, so
/// weaker reflections mean lower SNR.
pub const DEFAULT_NOISE_SD_V: f64 = 0.006;
/// Aliased 120 Hz ceiling-light flicker amplitude, volts.
pub const DEFAULT_FLICKER_120_V: f64 = 0.012;
/// Aliased 60 Hz monitor flicker amplitude, volts.
pub const DEFAULT_FLICKER_60_V: f64 = 0.006;
/// Photodiode resting output, volts.
pub const DEFAULT_BASELINE_V: f64 = 0.2;

/// Capture-environment description for one recording scenario.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScenarioSpec {
    pub source: LightSource,
    pub distance_cm: f64,
    pub lighting: Lighting,
    pub flicker_120_amp: f64,
    pub flicker_60_amp: f64,
    pub white_noise_sd: f64,
    pub baseline_volts: f64,
}

impl ScenarioSpec {
    /// Scenario with the default noise model. Lights off forces both
    /// flicker amplitudes to zero.
    pub fn new(
        source: LightSource,
        distance_cm: f64,
        lighting: Lighting,
    ) -> Result<ScenarioSpec, SynthError> {
        let (f120, f60) = match lighting {
            Lighting::On => (DEFAULT_FLICKER_120_V, DEFAULT_FLICKER_60_V),
            Lighting::Off => (0.0, 0.0),
        };
        let spec = ScenarioSpec {
            source,
            distance_cm,
            lighting,
            flicker_120_amp: f120,
            flicker_60_amp: f60,
            white_noise_sd: DEFAULT_NOISE_SD_V,
            baseline_volts: DEFAULT_BASELINE_V,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Named scenarios used throughout the experiments.
    pub fn preset(name: &str) -> Result<ScenarioSpec, SynthError> {
        use LightSource::{Infrared, Visible};
        use Lighting::{Off, On};
        match name {
            "ir20" => ScenarioSpec::new(Infrared, 20.0, On),
            "ir35" => ScenarioSpec::new(Infrared, 35.0, On),
            "vis20" => ScenarioSpec::new(Visible, 20.0, On),
            "vis35" => ScenarioSpec::new(Visible, 35.0, On),
            "ir20-dark" => ScenarioSpec::new(Infrared, 20.0, Off),
            "vis20-dark" => ScenarioSpec::new(Visible, 20.0, Off),
            other => Err(SynthError::UnknownPreset(other.to_string())),
        }
    }

    pub const PRESET_NAMES: [&'static str; 6] =
        ["ir20", "ir35", "vis20", "vis35", "ir20-dark", "vis20-dark"];

    pub fn validate(&self) -> Result<(), SynthError> {
        if !(self.flicker_120_amp >= 0.0 && self.flicker_60_amp >= 0.0) {
            return Err(SynthError::InvalidParams(
                "flicker amplitudes must be ≥ 0".into(),
            ));
        }
        if self.lighting == Lighting::Off
            && (self.flicker_120_amp != 0.0 || self.flicker_60_amp != 0.0)
        {
            return Err(SynthError::InvalidParams(
                "lights-off scenario cannot carry flicker".into(),
            ));
        }
        if !(self.white_noise_sd >= 0.0) {
            return Err(SynthError::InvalidParams("noise SD must be ≥ 0".into()));
        }
        if !(self.baseline_volts > 0.0) {
            return Err(SynthError::InvalidParams("baseline must be > 0".into()));
        }
        reflected_power(self.source, self.distance_cm).map(|_| ())
    }
}

/// Measured reflected power at the detector, mW, for a flat hand at seven
/// distances. Strictly decreasing in distance for both emitters.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTable {
    pub distances_cm: [f64; 7],
    pub infrared_mw: [f64; 7],
    pub visible_mw: [f64; 7],
}

impl PowerTable {
    pub fn reference() -> PowerTable {
        PowerTable {
            distances_cm: [5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0],
            infrared_mw: [1.09, 0.415, 0.248, 0.193, 0.065, 0.053, 0.048],
            visible_mw: [0.0512, 0.0412, 0.0364, 0.0337, 0.0315, 0.0296, 0.0286],
        }
    }

    fn column(&self, source: LightSource) -> &[f64; 7] {
        match source {
            LightSource::Infrared => &self.infrared_mw,
            LightSource::Visible => &self.visible_mw,
        }
    }

    /// Exact value at table nodes; log-log linear interpolation between.
    pub fn lookup(&self, source: LightSource, distance_cm: f64) -> Result<f64, SynthError> {
        let d = distance_cm;
        let nodes = &self.distances_cm;
        if !(d >= nodes[0] && d <= nodes[6]) {
            return Err(SynthError::OutOfRange(d));
        }
        let col = self.column(source);
        if let Some(i) = nodes.iter().position(|&x| x == d) {
            return Ok(col[i]);
        }
        let i = nodes.iter().rposition(|&x| x < d).expect("d > nodes[0]");
        let t = (d.ln() - nodes[i].ln()) / (nodes[i + 1].ln() - nodes[i].ln());
        Ok((col[i].ln() * (1.0 - t) + col[i + 1].ln() * t).exp())
    }
}

/// Reflected power from the reference table, mW.
pub fn reflected_power(source: LightSource, distance_cm: f64) -> Result<f64, SynthError> {
    PowerTable::reference().lookup(source, distance_cm)
}

/// Envelope attenuation of a scenario relative to the same source at the
/// 20 cm reference distance. Strictly decreasing in distance.
pub fn amplitude_scale(scenario: &ScenarioSpec) -> Result<f64, SynthError> {
    Ok(reflected_power(scenario.source, scenario.distance_cm)?
        / reflected_power(scenario.source, 20.0)?)
}

/// Power of a source at 20 cm relative to infrared at 20 cm: 1 for
/// infrared, the (weak) visible-to-infrared ratio otherwise.
pub fn source_level(source: LightSource) -> f64 {
    let table = PowerTable::reference();
    table.lookup(source, 20.0).expect("20 cm is a table node")
        / table
            .lookup(LightSource::Infrared, 20.0)
            .expect("20 cm is a table node")
}

/// Noiseless gesture bump description.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EnvelopeParams {
    pub gesture: GestureLabel,
    /// Nominal capture durations are 2–3 s; 0 is the degenerate empty bump.
    pub duration_s: f64,
    pub peak_volts: f64,
    pub subject_gain: f64,
    pub onset_s: f64,
}

/// Per-gesture envelope peak at the infrared/20 cm reference, volts.
/// Gesture d is the deliberately tiny sweep; the rest share one nominal
/// peak so that amplitude alone identifies no gesture.
const PEAK_V: [f64; 8] = [0.30, 0.30, 0.30, 0.12, 0.30, 0.30, 0.30, 0.30];

/// Per-gesture nominal duration, seconds. Gestures take characteristically
/// different times, so segment length itself carries class information; the
/// per-subject offset and per-repetition jitter keep neighbors overlapping.
/// Shapes that look alike are assigned well-separated durations.
const DURATION_S: [f64; 8] = [2.33, 2.67, 2.10, 2.56, 2.90, 2.21, 2.79, 2.44];

/// Raised-cosine bump centered at `c` with total width `w`, max 1.
fn bump(u: f64, c: f64, w: f64) -> f64 {
    let x = (u - c) / w;
    if x.abs() <= 0.5 {
        let v = (std::f64::consts::PI * x).cos();
        v * v
    } else {
        0.0
    }
}

/// Canonical unit shapes on u ∈ [0,1]: (a) slow ramp-up then drop,
/// (b) mirror of a, (c) single Gaussian bump, (d) low double ripple,
/// (e) double bump, (f) triple bump, (g) plateau, (h) sawtooth pair.
fn unit_shape(gesture: GestureLabel, u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        return 0.0;
    }
    match gesture {
        GestureLabel::A => {
            if u <= 0.8 {
                (u / 0.8).powf(1.5)
            } else {
                bump(u, 0.8, 0.4)
            }
        }
        GestureLabel::B => unit_shape(GestureLabel::A, 1.0 - u),
        GestureLabel::C => (-0.5 * ((u - 0.5) / 0.24).powi(2)).exp(),
        GestureLabel::D => bump(u, 0.30, 0.30) + 0.85 * bump(u, 0.70, 0.30),
        GestureLabel::E => bump(u, 0.27, 0.55) + bump(u, 0.73, 0.55),
        GestureLabel::F => {
            bump(u, 0.27, 0.55) + bump(u, 0.73, 0.55) + 0.30 * bump(u, 0.50, 0.30)
        }
        GestureLabel::G => {
            if u < 0.42 {
                let s = (std::f64::consts::PI * u / 0.84).sin();
                s * s
            } else if u <= 0.58 {
                1.0
            } else {
                let s = (std::f64::consts::PI * (1.0 - u) / 0.84).sin();
                s * s
            }
        }
        GestureLabel::H => {
            let v = (2.0 * u).fract();
            if v <= 0.8 {
                v / 0.8
            } else {
                (1.0 - v) / 0.2
            }
        }
    }
}

/// Sample the gesture bump over an `n`-sample window at `fs` Hz: zero
/// outside [onset, onset+duration], the canonical shape inside, rescaled so
/// the sampled maximum equals exactly `peak_volts · subject_gain`.
pub fn gesture_envelope(params: &EnvelopeParams, n: usize, fs: f64) -> Result<Vec<f64>, SynthError> {
    if !(fs > 0.0) {
        return Err(SynthError::InvalidParams("fs must be > 0".into()));
    }
    if n != (6.0 * fs).round() as usize {
        return Err(SynthError::InvalidParams(format!(
            "window of {n} samples does not cover 6 s at {fs} Hz"
        )));
    }
    if !(params.peak_volts > 0.0) {
        return Err(SynthError::InvalidParams("peak_volts must be > 0".into()));
    }
    if !(params.subject_gain > 0.0) {
        return Err(SynthError::InvalidParams("subject_gain must be > 0".into()));
    }
    if !(params.duration_s >= 0.0) || !(params.onset_s >= 0.0) {
        return Err(SynthError::InvalidParams(
            "onset and duration must be ≥ 0".into(),
        ));
    }
    let window_s = n as f64 / fs;
    if params.onset_s + params.duration_s > window_s + 1e-9 {
        return Err(SynthError::InvalidParams(format!(
            "onset {} + duration {} exceeds the {window_s} s window",
            params.onset_s, params.duration_s
        )));
    }

    let mut env = vec![0.0; n];
    if params.duration_s == 0.0 {
        return Ok(env);
    }
    for (i, e) in env.iter_mut().enumerate() {
        let t = i as f64 / fs;
        *e = unit_shape(params.gesture, (t - params.onset_s) / params.duration_s);
    }
    let max = env.iter().cloned().fold(0.0, f64::max);
    if max > 0.0 {
        let target = params.peak_volts * params.subject_gain;
        for e in env.iter_mut() {
            *e = (*e / max) * target;
        }
    }
    Ok(env)
}

/// SplitMix64 step; the standard 64-bit mixer.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derive a child seed from the master seed and a word path, so every
/// subject/gesture/repetition gets an independent, reproducible stream.
pub fn mix_seed(master: u64, path: &[u64]) -> u64 {
    let mut state = master;
    let mut out = splitmix64(&mut state);
    for &w in path {
        state ^= w.wrapping_mul(0xff51afd7ed558ccd).wrapping_add(out);
        out = splitmix64(&mut state);
    }
    out
}

const STREAM_SUBJECT: u64 = 1;
const STREAM_TRACE: u64 = 2;

/// Persistent per-subject characteristics drawn from the dataset seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubjectTraits {
    /// Reflectance/size multiplier on envelope amplitude, 2^±0.45.
    pub gain: f64,
    /// Personal additive shift applied to every gesture duration, seconds.
    pub duration_offset_s: f64,
}

pub fn subject_traits(dataset_seed: u64, subject_id: u32) -> SubjectTraits {
    let seed = mix_seed(dataset_seed, &[STREAM_SUBJECT, subject_id as u64]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SubjectTraits {
        gain: rng.gen_range(-0.45..0.45f64).exp2(),
        duration_offset_s: rng.gen_range(-0.12..0.12),
    }
}

fn trace_seed(dataset_seed: u64, subject_id: u32, gesture: GestureLabel, rep: u32) -> u64 {
    mix_seed(
        dataset_seed,
        &[
            STREAM_TRACE,
            subject_id as u64,
            gesture.index() as u64,
            rep as u64,
        ],
    )
}

fn build_trace(
    gesture: GestureLabel,
    scenario: &ScenarioSpec,
    subject_id: u32,
    dataset_seed: u64,
    rep: u32,
) -> Result<Trace, SynthError> {
    scenario.validate()?;
    let scale = amplitude_scale(scenario)? * source_level(scenario.source);
    let traits = subject_traits(dataset_seed, subject_id);
    let seed = trace_seed(dataset_seed, subject_id, gesture, rep);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Draw order is part of the format: duration, per-rep gain, onset,
    // two phases, noise.
    let duration = Normal::new(DURATION_S[gesture.index()] + traits.duration_offset_s, 0.04)
        .expect("valid duration jitter")
        .sample(&mut rng)
        .clamp(2.0, 3.0);
    // Hand pose and speed vary between repetitions, so the received
    // amplitude is an unreliable cue on its own.
    let rep_gain = rng.gen_range(-0.85..0.85f64).exp2();
    let onset = rng.gen_range(1.0..2.9);
    let tau = std::f64::consts::TAU;
    let phi_120 = rng.gen_range(0.0..tau);
    let phi_60 = rng.gen_range(0.0..tau);

    let env = gesture_envelope(
        &EnvelopeParams {
            gesture,
            duration_s: duration,
            peak_volts: PEAK_V[gesture.index()],
            subject_gain: traits.gain * rep_gain,
            onset_s: onset,
        },
        TRACE_LEN,
        SAMPLE_RATE_HZ,
    )?;

    let (a120, a60) = match scenario.lighting {
        Lighting::On => (scenario.flicker_120_amp, scenario.flicker_60_amp),
        Lighting::Off => (0.0, 0.0),
    };
    let noise = Normal::new(0.0, scenario.white_noise_sd)
        .map_err(|e| SynthError::InvalidParams(format!("noise SD: {e}")))?;

    let samples: Vec<f64> = env
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let t = i as f64 / SAMPLE_RATE_HZ;
            scenario.baseline_volts
                + e * scale
                + a120 * (tau * 120.0 * t + phi_120).sin()
                + a60 * (tau * 60.0 * t + phi_60).sin()
                + noise.sample(&mut rng)
        })
        .collect();

    Ok(Trace {
        samples,
        sample_rate: SAMPLE_RATE_HZ,
        meta: TraceMeta {
            subject_id,
            gesture,
            distance_cm: scenario.distance_cm,
            source: scenario.source,
            lighting: scenario.lighting,
            seed,
        },
    })
}

/// One synthetic trace. `seed` acts as a single-trace dataset seed; the same
/// arguments always produce the same samples.
pub fn synth_trace(
    gesture: GestureLabel,
    scenario: &ScenarioSpec,
    subject_id: u32,
    seed: u64,
) -> Result<Trace, SynthError> {
    build_trace(gesture, scenario, subject_id, seed, 0)
}

/// Shape of a synthetic capture campaign.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SynthSpec {
    pub scenario: ScenarioSpec,
    pub subjects: u32,
    pub reps: u32,
}

/// Reference campaign shape: 5 subjects × 8 gestures × 24 repetitions.
pub const REFERENCE_SUBJECTS: u32 = 5;
pub const REFERENCE_REPS: u32 = 24;

/// Synthesize `subjects × 8 × reps` traces, ordered by subject, then
/// gesture, then repetition.
pub fn synth_dataset(spec: &SynthSpec, seed: u64) -> Result<Dataset, SynthError> {
    if spec.subjects == 0 || spec.reps == 0 {
        return Err(SynthError::InvalidParams(
            "subjects and reps must be ≥ 1".into(),
        ));
    }
    let mut traces =
        Vec::with_capacity(spec.subjects as usize * GestureLabel::ALL.len() * spec.reps as usize);
    for subject in 1..=spec.subjects {
        for gesture in GestureLabel::ALL {
            for rep in 0..spec.reps {
                traces.push(build_trace(gesture, &spec.scenario, subject, seed, rep)?);
            }
        }
    }
    Ok(Dataset::from_traces(traces)?)
}
