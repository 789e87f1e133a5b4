//! `synth`: one synthetic WAV plus exact ground-truth sidecars.

use std::path::Path;

use serde::Serialize;

use noiseparity::{
    generate_synthetic, write_wav, BitDepth, SnrDb, SynthKind, SynthSpec, VadMask,
};

use crate::config::RunConfig;
use crate::report::{self, SCHEMA_VERSION};
use crate::{AppError, AppResult, KindArg, SynthArgs};

/// Ground truth for one synthetic file, written as `<stem>.truth.json`.
#[derive(Serialize)]
struct TruthSidecar<'a> {
    schema_version: u32,
    seed: u64,
    true_snr_db: Option<SnrDb>,
    /// Half-open sample ranges of the speech bursts.
    speech_regions: &'a [(usize, usize)],
    /// Speech gating under the default analysis framing.
    gate: &'a VadMask,
}

pub fn run(cfg: &RunConfig, args: &SynthArgs) -> AppResult<()> {
    let kind = match args.kind {
        KindArg::WhiteNoise => SynthKind::WhiteNoise { rms: args.rms },
        KindArg::Tone => SynthKind::Tone {
            freq_hz: args.freq_hz,
            amplitude: args.amplitude,
        },
        KindArg::SpeechLike => SynthKind::SpeechLike {
            burst_ms: args.burst_ms,
            gap_ms: args.gap_ms,
            mod_rate_hz: args.mod_rate_hz,
            carrier_hz: args.carrier_hz,
            amplitude: args.amplitude,
            noise_snr_db: args.noise_snr_db,
        },
    };
    let spec = SynthSpec {
        kind,
        duration_s: args.duration,
        sample_rate_hz: args.sample_rate,
        seed: cfg.seed,
    };
    let out = generate_synthetic(&spec).map_err(|e| AppError::usage(e.to_string()))?;

    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| AppError::runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    // Components must reconstruct the mix exactly, so everything is stored
    // as 64-bit float.
    write_wav(&args.out, &out.waveform, BitDepth::Float64)?;
    write_wav(&sidecar_path(&args.out, "clean.wav"), &out.clean, BitDepth::Float64)?;
    write_wav(&sidecar_path(&args.out, "noise.wav"), &out.noise, BitDepth::Float64)?;
    let truth = TruthSidecar {
        schema_version: SCHEMA_VERSION,
        seed: cfg.seed,
        true_snr_db: out.true_snr_db,
        speech_regions: &out.speech_regions,
        gate: &out.gate,
    };
    report::write_json(&sidecar_path(&args.out, "truth.json"), &truth)?;

    log::info!(
        "cmd=synth out={} samples={} sample_rate_hz={} regions={} true_snr_db={:?}",
        args.out.display(),
        out.waveform.len(),
        args.sample_rate,
        out.speech_regions.len(),
        out.true_snr_db.map(|s| s.value()),
    );
    Ok(())
}

/// `dir/name.wav` -> `dir/name.<suffix>`.
fn sidecar_path(out: &Path, suffix: &str) -> std::path::PathBuf {
    out.with_extension(suffix)
}
