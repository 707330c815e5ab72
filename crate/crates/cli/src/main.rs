//! `lws`: command-line front end for the light-wave gesture pipeline.
//!
//! Subcommands cover the whole workflow: synthesize labeled datasets,
//! denoise and segment individual traces, featurize a dataset, train and
//! apply the classifier, and run cross-validation or ablation studies.
//! `--json` switches stdout to machine-readable output. Exit codes: 0 on
//! success, 1 on processing failures, 2 on usage errors.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use lws_core::align;
use lws_core::classify::KnnModel;
use lws_core::evaluate::{self, ConfusionMatrix, EvalError, Protocol};
use lws_core::io::{self, format_volts};
use lws_core::pipeline::{self, AlignKind, FoldFeatures, PipelineConfig};
use lws_core::segment;
use lws_core::synth::{self, ScenarioSpec, SynthSpec, REFERENCE_REPS, REFERENCE_SUBJECTS};
use lws_core::types::{
    GestureLabel, LightSource, Lighting, Trace, TraceMeta, NUM_GESTURES, SAMPLE_RATE_HZ,
};
use lws_core::wavelet::{self, DenoiseConfig, ThresholdMode, ThresholdRule, WaveletError, WaveletId};

/// Post-parse argument problems (invalid combinations, bad preset names).
/// Mapped to exit code 2, like clap's own parse errors.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn parse_wavelet(s: &str) -> Result<WaveletId, WaveletError> {
    s.parse()
}

fn parse_rule(s: &str) -> Result<ThresholdRule, WaveletError> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<ThresholdMode, WaveletError> {
    s.parse()
}

fn parse_align(s: &str) -> Result<AlignKind, String> {
    s.parse()
}

fn parse_protocol(s: &str) -> Result<Protocol, EvalError> {
    s.parse()
}

/// Feature-length argument: derived from the data or forced to a value.
#[derive(Debug, Clone, Copy)]
enum LenArg {
    Auto,
    Fixed(usize),
}

impl FromStr for LenArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(LenArg::Auto);
        }
        match s.parse::<usize>() {
            Ok(0) => Err("length must be >= 1".into()),
            Ok(n) => Ok(LenArg::Fixed(n)),
            Err(_) => Err(format!("expected \"auto\" or a positive integer, got {s:?}")),
        }
    }
}

fn parse_len(s: &str) -> Result<LenArg, String> {
    s.parse()
}

#[derive(Args, Debug, Clone)]
struct DenoiseOpts {
    /// Mother wavelet: haar or db4.
    #[arg(long, default_value = "db4", value_parser = parse_wavelet)]
    wavelet: WaveletId,
    /// Decomposition depth.
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// Threshold rule: rigrsure, heursure, sqtwolog, or minimaxi.
    #[arg(long, default_value = "rigrsure", value_parser = parse_rule)]
    rule: ThresholdRule,
    /// Soft or hard thresholding.
    #[arg(long, default_value = "soft", value_parser = parse_mode)]
    mode: ThresholdMode,
    /// One pooled threshold for all detail bands instead of per-level values.
    #[arg(long)]
    global_threshold: bool,
}

impl DenoiseOpts {
    fn to_config(&self) -> DenoiseConfig {
        DenoiseConfig {
            wavelet_id: self.wavelet,
            levels: self.levels,
            rule: self.rule,
            mode: self.mode,
            level_dependent: !self.global_threshold,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct DetectOpts {
    /// Detection threshold as a multiple of the resting baseline.
    #[arg(long, default_value_t = segment::DEFAULT_FACTOR)]
    factor: f64,
    /// Samples averaged for the baseline estimate.
    #[arg(long, default_value_t = segment::DEFAULT_BASELINE_WINDOW)]
    baseline_window: usize,
}

#[derive(Args, Debug, Clone)]
struct PipelineOpts {
    #[command(flatten)]
    denoise: DenoiseOpts,
    /// Skip wavelet denoising.
    #[arg(long)]
    no_denoise: bool,
    #[command(flatten)]
    detect: DetectOpts,
    /// Skip z-score standardization of feature rows.
    #[arg(long)]
    no_standardize: bool,
    /// Alignment strategy: zeropad or dtw-to-template.
    #[arg(long, default_value = "zeropad", value_parser = parse_align)]
    align: AlignKind,
    /// Neighbors consulted by the classifier.
    #[arg(short, long, default_value_t = 5)]
    k: usize,
    /// Deal cross-validation folds purely at random instead of per label.
    #[arg(long)]
    no_stratify: bool,
}

impl PipelineOpts {
    fn to_config(&self) -> PipelineConfig {
        PipelineConfig {
            denoise: (!self.no_denoise).then(|| self.denoise.to_config()),
            detect_factor: self.detect.factor,
            baseline_window: self.detect.baseline_window,
            standardize: !self.no_standardize,
            align: self.align,
            knn_k: self.k,
            stratified: !self.no_stratify,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "lws",
    version,
    about = "Light-wave sensing gesture pipeline: synthesize, denoise, segment, featurize, classify, evaluate."
)]
struct Cli {
    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a labeled dataset directory for one capture scenario.
    Synth(SynthArgs),
    /// Wavelet-denoise one trace CSV.
    Denoise(DenoiseArgs),
    /// Locate the gesture in one trace and print its bounds as JSON.
    Segment(SegmentArgs),
    /// Turn a dataset into a feature matrix.
    Featurize(FeaturizeArgs),
    /// Train a k-nearest-neighbors model and save it as JSON.
    Train(TrainArgs),
    /// Classify one trace with a saved model.
    Predict(PredictArgs),
    /// Cross-validate the full pipeline on a dataset.
    Eval(EvalArgs),
    /// Print the magnitude spectrum of one trace as CSV.
    Spectrum(SpectrumArgs),
    /// Evaluate every denoise/standardize/alignment combination.
    Ablate(AblateArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Scenario preset: ir20, ir35, vis20, vis35, ir20-dark, or vis20-dark.
    #[arg(long)]
    preset: String,
    /// Participants to simulate.
    #[arg(long, default_value_t = REFERENCE_SUBJECTS)]
    subjects: u32,
    /// Repetitions per participant and gesture.
    #[arg(long, default_value_t = REFERENCE_REPS)]
    reps: u32,
    /// Master seed; every trace derives its own stream from it.
    #[arg(long, env = "LWS_SEED", default_value_t = 7)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Write into a non-empty output directory.
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug)]
struct DenoiseArgs {
    #[command(flatten)]
    opts: DenoiseOpts,
    /// Write magnitude spectra to PREFIX.before.csv and PREFIX.after.csv.
    #[arg(long, value_name = "PREFIX")]
    spectrum_before_after: Option<PathBuf>,
    /// Input trace CSV.
    input: PathBuf,
    /// Output trace CSV.
    output: PathBuf,
}

#[derive(Args, Debug)]
struct SegmentArgs {
    #[command(flatten)]
    denoise: DenoiseOpts,
    /// Detect on the raw trace instead of denoising first.
    #[arg(long)]
    no_denoise: bool,
    #[command(flatten)]
    detect: DetectOpts,
    /// Also write the trimmed segment as a trace CSV.
    #[arg(long, value_name = "FILE")]
    emit_trimmed: Option<PathBuf>,
    /// Input trace CSV.
    input: PathBuf,
}

#[derive(Args, Debug)]
struct FeaturizeArgs {
    #[command(flatten)]
    opts: PipelineOpts,
    /// Feature length: "auto" derives it from the data, a number forces it.
    #[arg(long, default_value = "auto", value_parser = parse_len)]
    len: LenArg,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dataset directory.
    data: PathBuf,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    opts: PipelineOpts,
    /// Model output file.
    #[arg(long)]
    out: PathBuf,
    /// Dataset directory.
    data: PathBuf,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[command(flatten)]
    denoise: DenoiseOpts,
    /// Skip wavelet denoising.
    #[arg(long)]
    no_denoise: bool,
    #[command(flatten)]
    detect: DetectOpts,
    /// Skip z-score standardization.
    #[arg(long)]
    no_standardize: bool,
    /// Saved model JSON. Queries are zero-padded to its feature length.
    #[arg(long)]
    model: PathBuf,
    /// Input trace CSV.
    input: PathBuf,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    opts: PipelineOpts,
    /// Validation protocol: kfold<N> (e.g. kfold10) or loso.
    #[arg(long, default_value = "kfold10", value_parser = parse_protocol)]
    protocol: Protocol,
    /// Fold-assignment seed (k-fold only).
    #[arg(long, env = "LWS_SEED", default_value_t = 7)]
    seed: u64,
    /// Write the full report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the confusion matrix as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Dataset directory.
    data: PathBuf,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Input trace CSV.
    input: PathBuf,
}

#[derive(Args, Debug)]
struct AblateArgs {
    /// Base configuration; denoise/standardize/align are overridden per row.
    #[command(flatten)]
    opts: PipelineOpts,
    /// Fold count for each run.
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Fold-assignment seed, shared by all rows.
    #[arg(long, env = "LWS_SEED", default_value_t = 7)]
    seed: u64,
    /// Write all rows as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dataset directory.
    data: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let json = cli.json;
    match cli.command {
        Command::Synth(a) => cmd_synth(a, json),
        Command::Denoise(a) => cmd_denoise(a, json),
        Command::Segment(a) => cmd_segment(a),
        Command::Featurize(a) => cmd_featurize(a, json),
        Command::Train(a) => cmd_train(a, json),
        Command::Predict(a) => cmd_predict(a, json),
        Command::Eval(a) => cmd_eval(a, json),
        Command::Spectrum(a) => cmd_spectrum(a, json),
        Command::Ablate(a) => cmd_ablate(a, json),
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("value serializes"));
}

fn write_file(path: &Path, body: &str) -> anyhow::Result<()> {
    fs::write(path, body).map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))
}

/// Write bare samples as a trace CSV; the metadata is not part of the file.
fn write_samples_csv(path: &Path, samples: &[f64]) -> anyhow::Result<()> {
    let trace = Trace {
        samples: samples.to_vec(),
        sample_rate: SAMPLE_RATE_HZ,
        meta: TraceMeta {
            subject_id: 0,
            gesture: GestureLabel::A,
            distance_cm: 20.0,
            source: LightSource::Infrared,
            lighting: Lighting::On,
            seed: 0,
        },
    };
    io::write_trace_csv(path, &trace)?;
    Ok(())
}

fn spectrum_csv(freqs: &[f64], mags: &[f64]) -> String {
    let mut out = String::from("freq_hz,magnitude\n");
    for (f, m) in freqs.iter().zip(mags) {
        out.push_str(&format!("{f},{m}\n"));
    }
    out
}

/// `prefix` + `suffix` as one file name (no separator inserted).
fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_synth(args: SynthArgs, json: bool) -> anyhow::Result<()> {
    let scenario =
        ScenarioSpec::preset(&args.preset).map_err(|e| UsageError(e.to_string()))?;
    let spec = SynthSpec {
        scenario,
        subjects: args.subjects,
        reps: args.reps,
    };
    let dataset = synth::synth_dataset(&spec, args.seed)?;
    if let Ok(mut entries) = fs::read_dir(&args.out) {
        if !args.force && entries.next().is_some() {
            anyhow::bail!(
                "{} is not empty; pass --force to write into it anyway",
                args.out.display()
            );
        }
    }
    io::write_dataset(&args.out, &dataset)?;
    if json {
        print_json(&json!({
            "config": {
                "command": "synth",
                "preset": &args.preset,
                "spec": &spec,
                "seed": args.seed,
                "out": &args.out,
            },
            "traces": dataset.len(),
            "checksum": dataset.checksum,
        }));
    } else {
        println!(
            "wrote {} traces ({} subjects x {} gestures x {} reps, preset {}) to {}",
            dataset.len(),
            args.subjects,
            NUM_GESTURES,
            args.reps,
            args.preset,
            args.out.display()
        );
        println!("checksum {}", dataset.checksum);
    }
    Ok(())
}

fn cmd_denoise(args: DenoiseArgs, json: bool) -> anyhow::Result<()> {
    let cfg = args.opts.to_config();
    let samples = io::read_trace_samples(&args.input)?;
    let decomp = wavelet::dwt_forward(&samples, cfg.wavelet_id, cfg.levels)?;
    let sigma = wavelet::estimate_noise_sigma(&decomp.details[0])?;
    let denoised = wavelet::denoise_signal(&samples, &cfg)?;
    write_samples_csv(&args.output, &denoised)?;

    let mut spectra: Option<(PathBuf, PathBuf)> = None;
    if let Some(prefix) = &args.spectrum_before_after {
        let before = with_suffix(prefix, ".before.csv");
        let after = with_suffix(prefix, ".after.csv");
        let (bf, bm) = evaluate::spectrum_of(&samples, SAMPLE_RATE_HZ);
        let (af, am) = evaluate::spectrum_of(&denoised, SAMPLE_RATE_HZ);
        write_file(&before, &spectrum_csv(&bf, &bm))?;
        write_file(&after, &spectrum_csv(&af, &am))?;
        spectra = Some((before, after));
    }

    if json {
        print_json(&json!({
            "config": {
                "command": "denoise",
                "denoise": &cfg,
                "input": &args.input,
                "output": &args.output,
            },
            "samples": denoised.len(),
            "noise_sigma_v": sigma,
            "spectrum_before": spectra.as_ref().map(|(b, _)| b),
            "spectrum_after": spectra.as_ref().map(|(_, a)| a),
        }));
    } else {
        println!(
            "denoised {} samples ({}, {} levels, {}/{}), noise sigma {:.6} V -> {}",
            denoised.len(),
            cfg.wavelet_id,
            cfg.levels,
            cfg.rule,
            cfg.mode,
            sigma,
            args.output.display()
        );
        if let Some((b, a)) = &spectra {
            println!("spectra -> {} and {}", b.display(), a.display());
        }
    }
    Ok(())
}

fn cmd_segment(args: SegmentArgs) -> anyhow::Result<()> {
    let dcfg = (!args.no_denoise).then(|| args.denoise.to_config());
    let samples = io::read_trace_samples(&args.input)?;
    let work = match &dcfg {
        Some(c) => wavelet::denoise_signal(&samples, c)?,
        None => samples,
    };
    let bounds = segment::detect_gesture_in(&work, args.detect.factor, args.detect.baseline_window)?;
    let trimmed = segment::trim(&work, &bounds);
    if let Some(out) = &args.emit_trimmed {
        write_samples_csv(out, &trimmed)?;
    }
    print_json(&json!({
        "config": {
            "command": "segment",
            "denoise": dcfg,
            "factor": args.detect.factor,
            "baseline_window": args.detect.baseline_window,
            "input": args.input,
        },
        "bounds": bounds,
        "trimmed_len": trimmed.len(),
        "duration_s": trimmed.len() as f64 / SAMPLE_RATE_HZ,
        "trimmed_out": args.emit_trimmed,
    }));
    Ok(())
}

fn feature_csv(ff: &FoldFeatures) -> String {
    let mut out = String::from("label");
    for i in 0..ff.feature_len {
        out.push_str(&format!(",f{i}"));
    }
    out.push('\n');
    for (label, row) in ff.train_labels.iter().zip(&ff.train) {
        out.push_str(label.as_str());
        for v in row {
            out.push(',');
            out.push_str(&format_volts(*v));
        }
        out.push('\n');
    }
    out
}

fn cmd_featurize(args: FeaturizeArgs, json: bool) -> anyhow::Result<()> {
    let cfg = args.opts.to_config();
    let dataset = io::read_dataset(&args.data)?;
    let prepared = pipeline::prepare(&dataset, &cfg)?;
    let ff = match (cfg.align, args.len) {
        (_, LenArg::Auto) => pipeline::featurize_all(&prepared, &cfg)?,
        (AlignKind::DtwToTemplate, LenArg::Fixed(_)) => {
            log::warn!("--len is ignored for dtw-to-template; the template span sets the length");
            pipeline::featurize_all(&prepared, &cfg)?
        }
        (AlignKind::Zeropad, LenArg::Fixed(n)) => {
            let mut rows = Vec::with_capacity(prepared.len());
            for p in &prepared {
                let seg = if p.segment.len() > n {
                    log::warn!("segment of {} samples truncated to --len {n}", p.segment.len());
                    &p.segment[..n]
                } else {
                    &p.segment[..]
                };
                let padded = align::zero_pad(seg, n)?;
                rows.push(if cfg.standardize {
                    align::zscore(&padded)?
                } else {
                    padded
                });
            }
            FoldFeatures {
                train: rows,
                train_labels: prepared.iter().map(|p| p.label).collect(),
                test: Vec::new(),
                test_labels: Vec::new(),
                feature_len: n,
            }
        }
    };

    let body = if json {
        let payload = json!({
            "config": {"command": "featurize", "data": &args.data, "pipeline": &cfg},
            "feature_len": ff.feature_len,
            "labels": &ff.train_labels,
            "features": &ff.train,
        });
        format!("{payload}\n")
    } else {
        feature_csv(&ff)
    };
    match &args.out {
        Some(p) => {
            write_file(p, &body)?;
            if !json {
                println!(
                    "wrote {} rows x {} features to {}",
                    ff.train.len(),
                    ff.feature_len,
                    p.display()
                );
            }
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn cmd_train(args: TrainArgs, json: bool) -> anyhow::Result<()> {
    let cfg = args.opts.to_config();
    if cfg.align == AlignKind::DtwToTemplate {
        return Err(UsageError(
            "train only supports --align zeropad: the model file stores flat rows of a fixed \
             feature length, while dtw-to-template features depend on split-specific templates"
                .into(),
        )
        .into());
    }
    let dataset = io::read_dataset(&args.data)?;
    let prepared = pipeline::prepare(&dataset, &cfg)?;
    let ff = pipeline::featurize_all(&prepared, &cfg)?;
    let model = KnnModel::train(&ff.train, &ff.train_labels, cfg.knn_k)?;
    write_file(&args.out, &(model.to_json() + "\n"))?;
    if json {
        print_json(&json!({
            "config": {"command": "train", "data": &args.data, "pipeline": &cfg},
            "rows": model.rows(),
            "feature_len": model.feature_len(),
            "k": model.k(),
            "out": args.out,
        }));
    } else {
        println!(
            "trained k={} model on {} rows ({} features) -> {}",
            model.k(),
            model.rows(),
            model.feature_len(),
            args.out.display()
        );
    }
    Ok(())
}

fn cmd_predict(args: PredictArgs, json: bool) -> anyhow::Result<()> {
    let cfg = PipelineConfig {
        denoise: (!args.no_denoise).then(|| args.denoise.to_config()),
        detect_factor: args.detect.factor,
        baseline_window: args.detect.baseline_window,
        standardize: !args.no_standardize,
        ..PipelineConfig::default()
    };
    let text = fs::read_to_string(&args.model)
        .map_err(|e| anyhow::anyhow!("reading {}: {e}", args.model.display()))?;
    let model = KnnModel::<f64>::from_json(&text)?;
    let samples = io::read_trace_samples(&args.input)?;
    let pipeline::PreparedSegment {
        segment: mut seg,
        fallback,
        ..
    } = pipeline::prepare_samples(&samples, &cfg)?;
    if let Some(e) = &fallback {
        log::warn!("{}: {e}; classifying the full trace", args.input.display());
    }
    let l = model.feature_len();
    if seg.len() > l {
        log::warn!(
            "segment of {} samples truncated to the model's feature length {l}",
            seg.len()
        );
        seg.truncate(l);
    }
    let padded = align::zero_pad(&seg, l)?;
    let features = if cfg.standardize {
        align::zscore(&padded)?
    } else {
        padded
    };
    let pred = model.predict(&features)?;
    if json {
        let votes: serde_json::Map<String, serde_json::Value> = GestureLabel::ALL
            .iter()
            .zip(pred.votes)
            .map(|(l, v)| (l.as_str().to_string(), v.into()))
            .collect();
        print_json(&json!({
            "config": {
                "command": "predict",
                "model": &args.model,
                "input": &args.input,
                "denoise": &cfg.denoise,
                "factor": cfg.detect_factor,
                "baseline_window": cfg.baseline_window,
                "standardize": cfg.standardize,
            },
            "label": pred.label,
            "votes": votes,
            "fallback": fallback.is_some(),
        }));
    } else {
        println!("{}", pred.label);
    }
    Ok(())
}

fn print_confusion(m: &ConfusionMatrix) {
    print!("{:>10}", "truth\\pred");
    for l in GestureLabel::ALL {
        print!("{:>8}", l.as_str());
    }
    println!("{:>9}", "support");
    for (i, l) in GestureLabel::ALL.iter().enumerate() {
        print!("{:>10}", l.as_str());
        for j in 0..NUM_GESTURES {
            print!("{:>8.3}", m.rows[i][j]);
        }
        println!("{:>9}", m.support[i]);
    }
}

fn cmd_eval(args: EvalArgs, json: bool) -> anyhow::Result<()> {
    let cfg = args.opts.to_config();
    let dataset = io::read_dataset(&args.data)?;
    let report = match args.protocol {
        Protocol::KFold(k) => evaluate::cross_validate(&dataset, &cfg, k, args.seed)?,
        Protocol::Loso => evaluate::leave_one_subject_out(&dataset, &cfg)?,
    };
    let payload = json!({
        "config": {
            "command": "eval",
            "protocol": args.protocol.to_string(),
            "seed": args.seed,
            "data": &args.data,
            "pipeline": &cfg,
        },
        "dataset_checksum": dataset.checksum,
        "report": &report,
    });
    if let Some(p) = &args.out {
        write_file(p, &format!("{}\n", serde_json::to_string_pretty(&payload)?))?;
    }
    if let Some(p) = &args.csv {
        write_file(p, &report.confusion.to_csv())?;
    }
    if json {
        print_json(&payload);
    } else {
        println!(
            "protocol {}   seed {}   folds {}",
            report.protocol,
            report.seed,
            report.fold_accuracies.len()
        );
        println!(
            "mean accuracy {:.4}   sd {:.4}",
            report.mean_accuracy, report.accuracy_sd
        );
        let folds: Vec<String> = report
            .fold_accuracies
            .iter()
            .map(|a| format!("{a:.4}"))
            .collect();
        println!("fold accuracies: {}", folds.join(" "));
        println!("confusion (rows = truth, fractions of row support):");
        print_confusion(&report.confusion);
        if let Some(p) = &args.out {
            println!("report -> {}", p.display());
        }
        if let Some(p) = &args.csv {
            println!("confusion -> {}", p.display());
        }
    }
    Ok(())
}

fn cmd_spectrum(args: SpectrumArgs, json: bool) -> anyhow::Result<()> {
    let samples = io::read_trace_samples(&args.input)?;
    let (freqs, mags) = evaluate::spectrum_of(&samples, SAMPLE_RATE_HZ);
    let body = if json {
        let payload = json!({
            "config": {"command": "spectrum", "input": args.input},
            "freq_hz": freqs,
            "magnitude": mags,
        });
        format!("{payload}\n")
    } else {
        spectrum_csv(&freqs, &mags)
    };
    match &args.out {
        Some(p) => {
            write_file(p, &body)?;
            if !json {
                println!("wrote {} bins to {}", freqs.len(), p.display());
            }
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn cmd_ablate(args: AblateArgs, json: bool) -> anyhow::Result<()> {
    let cfg = args.opts.to_config();
    let dataset = io::read_dataset(&args.data)?;
    let rows = evaluate::ablation_run(&dataset, &cfg, args.folds, args.seed)?;
    let payload = json!({
        "config": {
            "command": "ablate",
            "folds": args.folds,
            "seed": args.seed,
            "data": &args.data,
            "pipeline": &cfg,
        },
        "dataset_checksum": dataset.checksum,
        "rows": &rows,
    });
    if let Some(p) = &args.out {
        write_file(p, &format!("{}\n", serde_json::to_string_pretty(&payload)?))?;
    }
    if json {
        print_json(&payload);
    } else {
        let onoff = |b: bool| if b { "on" } else { "off" };
        println!(
            "{:<8} {:<12} {:<16} {:>8} {:>8}",
            "denoise", "standardize", "align", "mean", "sd"
        );
        for row in &rows {
            println!(
                "{:<8} {:<12} {:<16} {:>8.4} {:>8.4}",
                onoff(row.toggles.denoise),
                onoff(row.toggles.standardize),
                row.toggles.align.as_str(),
                row.report.mean_accuracy,
                row.report.accuracy_sd
            );
        }
        if let Some(p) = &args.out {
            println!("rows -> {}", p.display());
        }
    }
    Ok(())
}
