//! Run configuration: defaults, optional TOML file, command-line overrides.
//!
//! Precedence is strict and uniform: a command-line flag beats the config
//! file, which beats the built-in default. Subcommands consume the
//! resolved [`RunConfig`] and never read the file themselves.

use std::path::Path;

use serde::Deserialize;

use noiseparity::{BitDepth, SnrSetting, VadConfig};

use crate::{AppError, AppResult, Cli};

/// Raw shape of the TOML config file. Every field is optional; unknown
/// keys are rejected so typos fail loudly.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    epoch: Option<u64>,
    threads: Option<usize>,
    setting: Option<String>,
    bit_depth: Option<String>,
    keep_components: Option<bool>,
    vad: Option<VadConfig>,
}

/// Fully resolved settings shared by all subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Master seed; every random decision derives from it.
    pub seed: u64,
    /// Default epoch for pairing plans.
    pub epoch: u64,
    /// Requested worker-thread count, if any.
    pub threads: Option<usize>,
    /// Default SNR setting for `mix`.
    pub setting: Option<SnrSetting>,
    /// Default output encoding.
    pub bit_depth: BitDepth,
    /// Whether `mix` stores exact component sidecars.
    pub keep_components: bool,
    /// Voice-activity-detection parameters.
    pub vad: VadConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            epoch: 0,
            threads: None,
            setting: None,
            bit_depth: BitDepth::Float32,
            keep_components: false,
            vad: VadConfig::default(),
        }
    }
}

/// Parses an SNR setting name (`A`, `B`, or `C`, case-insensitive).
pub fn parse_setting(s: &str) -> Result<SnrSetting, String> {
    s.parse::<SnrSetting>().map_err(|e| e.to_string())
}

/// Parses an output encoding name.
pub fn parse_bit_depth(s: &str) -> Result<BitDepth, String> {
    match s.to_ascii_lowercase().as_str() {
        "int16" => Ok(BitDepth::Int16),
        "float32" => Ok(BitDepth::Float32),
        "float64" => Ok(BitDepth::Float64),
        other => Err(format!(
            "unknown bit depth \"{other}\" (expected int16, float32, or float64)"
        )),
    }
}

/// Builds the effective configuration for this invocation.
pub fn resolve(cli: &Cli) -> AppResult<RunConfig> {
    let mut cfg = RunConfig::default();

    if let Some(path) = &cli.config {
        let file = load_file(path)?;
        if let Some(seed) = file.seed {
            cfg.seed = seed;
        }
        if let Some(epoch) = file.epoch {
            cfg.epoch = epoch;
        }
        if let Some(threads) = file.threads {
            cfg.threads = Some(threads);
        }
        if let Some(setting) = &file.setting {
            cfg.setting = Some(parse_setting(setting).map_err(|e| {
                AppError::usage(format!("{}: setting: {e}", path.display()))
            })?);
        }
        if let Some(depth) = &file.bit_depth {
            cfg.bit_depth = parse_bit_depth(depth).map_err(|e| {
                AppError::usage(format!("{}: bit_depth: {e}", path.display()))
            })?;
        }
        if let Some(keep) = file.keep_components {
            cfg.keep_components = keep;
        }
        if let Some(vad) = file.vad {
            vad.validate()
                .map_err(|e| AppError::usage(format!("{}: vad: {e}", path.display())))?;
            cfg.vad = vad;
        }
    }

    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = cli.threads {
        cfg.threads = Some(threads);
    }
    Ok(cfg)
}

fn load_file(path: &Path) -> AppResult<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| AppError::usage(format!("cannot parse config {}: {e}", path.display())))
}
