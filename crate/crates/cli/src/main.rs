//! Command-line pipeline for cross-group noise augmentation.
//!
//! Subcommands mirror the pipeline stages: `synth` generates ground-truth
//! test signals, `mix` builds a noisy corpus at controlled per-group SNRs,
//! `augment` cross-injects noise estimates between the groups, and
//! `verify` measures the SNR-matching residuals (or the no-augmentation
//! disparity baseline).
//!
//! Exit codes are a stable contract: 0 success / criteria met, 1 runtime
//! failure or criteria exceeded, 2 usage or configuration error. Logs go
//! to stderr as key=value lines; reports go to files.

mod commands;
mod config;
mod logging;
mod records;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Errors surfaced to the user, partitioned by exit code.
#[derive(Debug)]
pub enum AppError {
    /// Bad arguments or configuration: exit 2.
    Usage(String),
    /// Failures while doing the work, including unmet tolerances: exit 1.
    Runtime(String),
}

impl AppError {
    pub fn usage(msg: impl Into<String>) -> Self {
        AppError::Usage(msg.into())
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        AppError::Runtime(msg.into())
    }
}

impl From<noiseparity::Error> for AppError {
    fn from(e: noiseparity::Error) -> Self {
        AppError::Runtime(e.to_string())
    }
}

pub type AppResult<T> = Result<T, AppError>;

#[derive(Parser, Debug)]
#[command(
    name = "noiseparity",
    version,
    about = "Suppress noise disparity between two speech groups by cross-injecting \
             VAD-estimated noise at SNR-equalizing scales"
)]
pub struct Cli {
    /// TOML config file; command-line flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Master seed for every random decision in the run.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,

    /// Worker threads for batch stages (default: all processors).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Log verbosity on stderr.
    #[arg(long, global = true, value_name = "LEVEL", value_parser = ["error", "warn", "info", "debug", "trace"])]
    pub log_level: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic signal with exact ground-truth sidecars.
    Synth(SynthArgs),
    /// Mix a clean corpus with per-group noise at a target SNR setting.
    Mix(MixArgs),
    /// Cross-inject noise estimates between the groups for one epoch.
    Augment(AugmentArgs),
    /// Measure SNR-matching residuals or the disparity baseline.
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindArg {
    #[value(name = "whitenoise")]
    WhiteNoise,
    #[value(name = "tone")]
    Tone,
    #[value(name = "speechlike")]
    SpeechLike,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Signal family to generate.
    #[arg(long, value_enum)]
    pub kind: KindArg,

    /// Signal length in seconds.
    #[arg(long, default_value_t = 4.0, value_name = "SECONDS")]
    pub duration: f64,

    /// Output sample rate in Hz.
    #[arg(long, default_value_t = 16_000, value_name = "HZ")]
    pub sample_rate: u32,

    /// RMS level (whitenoise).
    #[arg(long, default_value_t = 0.1)]
    pub rms: f64,

    /// Frequency in Hz (tone).
    #[arg(long, default_value_t = 440.0)]
    pub freq_hz: f64,

    /// Peak amplitude before modulation (tone, speechlike).
    #[arg(long, default_value_t = 0.3)]
    pub amplitude: f64,

    /// Burst length in ms (speechlike).
    #[arg(long, default_value_t = 500.0)]
    pub burst_ms: f64,

    /// Gap length in ms (speechlike).
    #[arg(long, default_value_t = 500.0)]
    pub gap_ms: f64,

    /// Amplitude-modulation rate in Hz (speechlike).
    #[arg(long, default_value_t = 4.0)]
    pub mod_rate_hz: f64,

    /// Carrier frequency in Hz (speechlike).
    #[arg(long, default_value_t = 220.0)]
    pub carrier_hz: f64,

    /// Add white noise at this SNR in dB (speechlike; omit for silent gaps).
    #[arg(long)]
    pub noise_snr_db: Option<f64>,

    /// Output WAV path; ground-truth sidecars are written next to it.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct MixArgs {
    /// Clean-corpus manifest (JSON Lines).
    #[arg(long, value_name = "PATH")]
    pub manifest: PathBuf,

    /// Noise WAV mixed into every healthy utterance.
    #[arg(long, value_name = "PATH")]
    pub noise_healthy: PathBuf,

    /// Noise WAV mixed into every pathological utterance.
    #[arg(long, value_name = "PATH")]
    pub noise_pathological: PathBuf,

    /// SNR setting: A (20/20 dB), B (40/40 dB), or C (20/40 dB).
    #[arg(long, value_parser = config::parse_setting)]
    pub setting: Option<noiseparity::SnrSetting>,

    /// Directory for the noisy corpus and its manifest.
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,

    /// Output encoding: float32, float64, or int16 (hard-clips).
    #[arg(long, value_parser = config::parse_bit_depth)]
    pub bit_depth: Option<noiseparity::BitDepth>,

    /// Also store the exact clean/noise components per file (forces
    /// float64 output).
    #[arg(long)]
    pub keep_components: bool,
}

#[derive(Args, Debug)]
pub struct AugmentArgs {
    /// Noisy-corpus manifest (JSON Lines).
    #[arg(long, value_name = "PATH")]
    pub manifest: PathBuf,

    /// Directory for augmented audio, plan, and estimate records.
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,

    /// Training epoch the pairing is generated for.
    #[arg(long, value_name = "N")]
    pub epoch: Option<u64>,

    /// Output encoding: float32, float64, or int16 (hard-clips).
    #[arg(long, value_parser = config::parse_bit_depth)]
    pub bit_depth: Option<noiseparity::BitDepth>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    /// True components from mix sidecars; tolerance defaults to 1e-9 dB.
    Oracle,
    /// Stored estimates from an augment run; tolerance defaults to 2 dB.
    Practical,
    /// Per-group estimated-SNR disparity of an unaugmented corpus.
    Baseline,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// What to measure.
    #[arg(long, value_enum)]
    pub mode: ModeArg,

    /// Mix output directory with --keep-components sidecars (oracle mode).
    #[arg(long, value_name = "DIR")]
    pub corpus: Option<PathBuf>,

    /// Augment output directory (practical mode).
    #[arg(long, value_name = "DIR")]
    pub augmented: Option<PathBuf>,

    /// Noisy-corpus manifest (baseline mode).
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,

    /// Pairing plan JSON (oracle mode); generated from seed/epoch when
    /// omitted.
    #[arg(long, value_name = "PATH")]
    pub plan: Option<PathBuf>,

    /// Epoch for the generated pairing when no plan file is given.
    #[arg(long, value_name = "N")]
    pub epoch: Option<u64>,

    /// Where to write the JSON report.
    #[arg(long, value_name = "PATH", default_value = "verify_report.json")]
    pub report: PathBuf,

    /// Pass/fail threshold on |residual| in dB (oracle 1e-9, practical 2.0
    /// when omitted; unused by baseline).
    #[arg(long, value_name = "DB")]
    pub tolerance_db: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    logging::init(cli.log_level.as_deref().unwrap_or("info"));
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> AppResult<()> {
    let cfg = config::resolve(&cli)?;
    init_threads(cfg.threads);
    match &cli.command {
        Command::Synth(args) => commands::synth::run(&cfg, args),
        Command::Mix(args) => commands::mix::run(&cfg, args),
        Command::Augment(args) => commands::augment::run(&cfg, args),
        Command::Verify(args) => commands::verify::run(&cfg, args),
    }
}

#[cfg(feature = "parallel")]
fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("event=thread_pool_init_failed threads={n} err=\"{e}\"");
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        log::warn!("event=threads_ignored threads={n} reason=\"built without the parallel feature\"");
    }
}
