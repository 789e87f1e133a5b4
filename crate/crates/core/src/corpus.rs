//! Dataset handling: JSON Lines manifests, synthetic test-signal
//! generation with exact ground truth, and batch construction of noisy
//! corpora at controlled per-group SNRs.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::augment::Group;
use crate::error::{Error, Result};
use crate::exec;
use crate::fsio;
use crate::seed;
use crate::signal::{self, SnrDb, Waveform};
use crate::vad::{FrameLabel, VadConfig, VadMask};
use crate::wav::{self, BitDepth};

/// Modulation depth of the amplitude-modulated bursts in speech-like
/// synthetic signals.
const AM_DEPTH: f64 = 0.3;

/// Dataset split tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

/// One corpus file: where it lives and what is known about it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Audio file location; relative paths resolve against the manifest's
    /// directory at load time.
    pub path: PathBuf,
    pub utterance_id: String,
    pub speaker_id: String,
    pub group: Group,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
    /// The SNR the file was constructed at; present only for corpora this
    /// tool built itself.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_snr_db: Option<f64>,
}

/// Reads a JSON Lines manifest: one entry per non-blank line. Relative
/// paths are resolved against the manifest's directory and every resolved
/// path must exist. Duplicate utterance ids are rejected.
pub fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut entries = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut entry: ManifestEntry =
            serde_json::from_str(line).map_err(|e| Error::Format {
                line: i + 1,
                message: e.to_string(),
            })?;
        if !ids.insert(entry.utterance_id.clone()) {
            return Err(Error::DuplicateId(entry.utterance_id));
        }
        if entry.path.is_relative() {
            entry.path = base.join(&entry.path);
        }
        if !entry.path.exists() {
            return Err(Error::io(
                &entry.path,
                std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    format!("referenced on line {} of the manifest", i + 1),
                ),
            ));
        }
        entries.push(entry);
    }
    Ok(entries)
}

/// Writes entries as JSON Lines, atomically.
pub fn save_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<()> {
    let mut out = String::new();
    for entry in entries {
        // Serialization of these plain fields cannot fail.
        out.push_str(&serde_json::to_string(entry).expect("manifest entry serializes"));
        out.push('\n');
    }
    fsio::atomic_write_bytes(path, out.as_bytes())
}

/// The three corpus SNR conditions: both groups at 20 dB, both at 40 dB,
/// or healthy at 20 dB against pathological at 40 dB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SnrSetting {
    A,
    B,
    C,
}

impl SnrSetting {
    pub fn healthy_snr_db(self) -> f64 {
        match self {
            SnrSetting::A | SnrSetting::C => 20.0,
            SnrSetting::B => 40.0,
        }
    }

    pub fn pathological_snr_db(self) -> f64 {
        match self {
            SnrSetting::A => 20.0,
            SnrSetting::B | SnrSetting::C => 40.0,
        }
    }

    pub fn target_for(self, group: Group) -> f64 {
        match group {
            Group::Healthy => self.healthy_snr_db(),
            Group::Pathological => self.pathological_snr_db(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SnrSetting::A => "A",
            SnrSetting::B => "B",
            SnrSetting::C => "C",
        }
    }
}

impl FromStr for SnrSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(SnrSetting::A),
            "B" | "b" => Ok(SnrSetting::B),
            "C" | "c" => Ok(SnrSetting::C),
            other => Err(Error::InvalidInput(format!(
                "unknown SNR setting '{other}' (expected A, B, or C)"
            ))),
        }
    }
}

impl std::fmt::Display for SnrSetting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What kind of synthetic signal to generate, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SynthKind {
    /// Stationary Gaussian noise with the given RMS level.
    WhiteNoise { rms: f64 },
    /// A steady sinusoid.
    Tone { freq_hz: f64, amplitude: f64 },
    /// Speech-like signal: hard-gated bursts of an amplitude-modulated
    /// carrier separated by silence, optionally over white noise at a
    /// target SNR.
    SpeechLike {
        burst_ms: f64,
        gap_ms: f64,
        mod_rate_hz: f64,
        carrier_hz: f64,
        amplitude: f64,
        /// When set, white noise is added so the clean-vs-noise SNR equals
        /// this value; when absent the gaps are digital silence.
        noise_snr_db: Option<f64>,
    },
}

/// A fully specified synthetic signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    #[serde(flatten)]
    pub kind: SynthKind,
    pub duration_s: f64,
    pub sample_rate_hz: u32,
    pub seed: u64,
}

impl SynthSpec {
    fn num_samples(&self) -> usize {
        (self.duration_s * self.sample_rate_hz as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(Error::InvalidInput("duration_s must be positive".into()));
        }
        if self.sample_rate_hz == 0 {
            return Err(Error::InvalidInput("sample_rate_hz must be positive".into()));
        }
        let cfg = VadConfig::default();
        let frame = cfg.frame_len_samples(self.sample_rate_hz);
        if self.num_samples() < frame {
            return Err(Error::InvalidInput(format!(
                "duration {}s is shorter than one analysis frame",
                self.duration_s
            )));
        }
        let nyquist = self.sample_rate_hz as f64 / 2.0;
        match &self.kind {
            SynthKind::WhiteNoise { rms } => {
                if !(rms.is_finite() && *rms > 0.0) {
                    return Err(Error::InvalidInput("rms must be positive".into()));
                }
            }
            SynthKind::Tone { freq_hz, amplitude } => {
                if !(freq_hz.is_finite() && *freq_hz > 0.0 && *freq_hz < nyquist) {
                    return Err(Error::InvalidInput(format!(
                        "freq_hz must be in (0, {nyquist})"
                    )));
                }
                if !(amplitude.is_finite() && *amplitude > 0.0) {
                    return Err(Error::InvalidInput("amplitude must be positive".into()));
                }
            }
            SynthKind::SpeechLike {
                burst_ms,
                gap_ms,
                mod_rate_hz,
                carrier_hz,
                amplitude,
                noise_snr_db,
            } => {
                // Bursts and gaps must each outlast an analysis frame, or
                // the ground-truth gating cannot be meaningfully framed.
                let min_ms = cfg.frame_ms;
                if !(burst_ms.is_finite() && *burst_ms > min_ms) {
                    return Err(Error::InvalidInput(format!(
                        "burst_ms must exceed one analysis frame ({min_ms} ms)"
                    )));
                }
                if !(gap_ms.is_finite() && *gap_ms > min_ms) {
                    return Err(Error::InvalidInput(format!(
                        "gap_ms must exceed one analysis frame ({min_ms} ms)"
                    )));
                }
                if !(mod_rate_hz.is_finite() && *mod_rate_hz > 0.0) {
                    return Err(Error::InvalidInput("mod_rate_hz must be positive".into()));
                }
                if !(carrier_hz.is_finite() && *carrier_hz > 0.0 && *carrier_hz < nyquist) {
                    return Err(Error::InvalidInput(format!(
                        "carrier_hz must be in (0, {nyquist})"
                    )));
                }
                if !(amplitude.is_finite() && *amplitude > 0.0) {
                    return Err(Error::InvalidInput("amplitude must be positive".into()));
                }
                if let Some(snr) = noise_snr_db {
                    if !snr.is_finite() {
                        return Err(Error::InvalidInput("noise_snr_db must be finite".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A generated signal together with its exact decomposition and gating.
#[derive(Debug, Clone)]
pub struct SynthOutput {
    /// clean + noise, the signal a pipeline consumer would see.
    pub waveform: Waveform,
    /// The exact clean component (all zeros for pure noise).
    pub clean: Waveform,
    /// The exact noise component (all zeros for noiseless kinds).
    pub noise: Waveform,
    /// Ground-truth speech gating under the default analysis framing: a
    /// frame is Speech iff its window overlaps a burst by at least one
    /// sample.
    pub gate: VadMask,
    /// Half-open sample ranges of the bursts.
    pub speech_regions: Vec<(usize, usize)>,
    /// Exact SNR of clean vs noise, when both components are non-silent.
    pub true_snr_db: Option<SnrDb>,
}

/// Ground-truth speech mask for a signal with known burst placement:
/// a frame is Speech iff its window overlaps any speech region by at
/// least one sample.
pub fn ground_truth_mask(
    total_samples: usize,
    sample_rate_hz: u32,
    speech_regions: &[(usize, usize)],
    cfg: &VadConfig,
) -> Result<VadMask> {
    cfg.validate()?;
    let frame_len = cfg.frame_len_samples(sample_rate_hz);
    let hop = cfg.hop_samples(sample_rate_hz);
    if frame_len == 0 || hop == 0 || total_samples < frame_len {
        return Err(Error::TooShort {
            samples: total_samples,
            needed: frame_len.max(1),
        });
    }
    let num_frames = (total_samples - frame_len) / hop + 1;
    let frame_labels = (0..num_frames)
        .map(|i| {
            let start = i * hop;
            let end = start + frame_len;
            let overlaps = speech_regions
                .iter()
                .any(|&(rs, re)| rs < end && re > start);
            if overlaps {
                FrameLabel::Speech
            } else {
                FrameLabel::Noise
            }
        })
        .collect();
    Ok(VadMask {
        frame_labels,
        frame_len_samples: frame_len,
        hop_samples: hop,
        total_samples,
    })
}

fn white_noise(len: usize, rms: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let dist = Normal::new(0.0, rms).expect("rms validated positive and finite");
    (0..len).map(|_| dist.sample(rng)).collect()
}

/// Generates the signal described by `spec`, deterministically in
/// `spec.seed`, together with its exact clean/noise decomposition and
/// ground-truth gating.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<SynthOutput> {
    spec.validate()?;
    let n = spec.num_samples();
    let rate = spec.sample_rate_hz;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let vad_cfg = VadConfig::default();

    let (clean, noise, speech_regions) = match &spec.kind {
        SynthKind::WhiteNoise { rms } => {
            let noise = Waveform::from_finite(white_noise(n, *rms, &mut rng), rate);
            (Waveform::from_finite(vec![0.0; n], rate), noise, Vec::new())
        }
        SynthKind::Tone { freq_hz, amplitude } => {
            let w = 2.0 * std::f64::consts::PI * freq_hz / rate as f64;
            let clean = Waveform::from_finite(
                (0..n).map(|i| amplitude * (w * i as f64).sin()).collect(),
                rate,
            );
            let regions = vec![(0usize, n)];
            (clean, Waveform::from_finite(vec![0.0; n], rate), regions)
        }
        SynthKind::SpeechLike {
            burst_ms,
            gap_ms,
            mod_rate_hz,
            carrier_hz,
            amplitude,
            noise_snr_db,
        } => {
            let burst = (burst_ms / 1000.0 * rate as f64).round() as usize;
            let gap = (gap_ms / 1000.0 * rate as f64).round() as usize;
            let period = burst + gap;
            let wc = 2.0 * std::f64::consts::PI * carrier_hz / rate as f64;
            let wm = 2.0 * std::f64::consts::PI * mod_rate_hz / rate as f64;
            let mut clean = vec![0.0f64; n];
            let mut regions = Vec::new();
            let mut start = 0usize;
            while start < n {
                let end = (start + burst).min(n);
                regions.push((start, end));
                for (i, c) in clean.iter_mut().enumerate().take(end).skip(start) {
                    let t = i as f64;
                    let envelope = 1.0 + AM_DEPTH * (wm * t).sin();
                    *c = amplitude * envelope * (wc * t).sin();
                }
                start += period;
            }
            let clean = Waveform::from_finite(clean, rate);
            let noise = match noise_snr_db {
                Some(target) => {
                    let raw = Waveform::from_finite(white_noise(n, 1.0, &mut rng), rate);
                    let beta = signal::snr_scale(
                        signal::power(&clean)?,
                        signal::power(&raw)?,
                        SnrDb::new(*target)?,
                    )?;
                    raw.scaled(beta)?
                }
                None => Waveform::from_finite(vec![0.0; n], rate),
            };
            (clean, noise, regions)
        }
    };

    let waveform = signal::add_scaled(&clean, &noise, 1.0)?;
    let gate = ground_truth_mask(n, rate, &speech_regions, &vad_cfg)?;
    let p_clean = signal::power(&clean)?;
    let p_noise = signal::power(&noise)?;
    let true_snr_db = if p_clean.value() > 0.0 && p_noise.value() > 0.0 {
        Some(signal::snr_db(p_clean, p_noise)?)
    } else {
        None
    };
    Ok(SynthOutput {
        waveform,
        clean,
        noise,
        gate,
        speech_regions,
        true_snr_db,
    })
}

/// Output encoding options for corpus construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixOptions {
    /// Encoding of the mixed output files. Ignored (forced to 64-bit
    /// float) when `keep_components` is set, so that the stored components
    /// reconstruct the output exactly.
    pub bit_depth: BitDepth,
    /// Also write per-file `<id>.clean.wav` and `<id>.noise.wav` sidecars
    /// holding the exact components of the mix.
    pub keep_components: bool,
}

impl Default for MixOptions {
    fn default() -> Self {
        MixOptions {
            bit_depth: BitDepth::Float32,
            keep_components: false,
        }
    }
}

/// One output of [`build_noisy_corpus`].
#[derive(Debug, Clone)]
pub struct MixedFile {
    /// Entry for the output manifest; `path` is the bare file name,
    /// relative to the output directory.
    pub entry: ManifestEntry,
    /// SNR measured from the component powers of the written mix.
    pub achieved_snr_db: f64,
    /// Samples hard-clipped by integer encoding (0 for float output).
    pub clipped_samples: usize,
}

fn rotate(w: &Waveform, offset: usize) -> Waveform {
    let src = w.samples();
    let mut out = Vec::with_capacity(src.len());
    out.extend_from_slice(&src[offset..]);
    out.extend_from_slice(&src[..offset]);
    Waveform::from_finite(out, w.sample_rate_hz())
}

fn check_utterance_id(id: &str) -> Result<()> {
    if id.is_empty() || id.contains('/') || id.contains('\\') || id.contains("..") {
        return Err(Error::InvalidInput(format!(
            "utterance id '{id}' is empty or not usable as a file name"
        )));
    }
    Ok(())
}

fn mix_one(
    entry: &ManifestEntry,
    noise: &Waveform,
    target_db: f64,
    out_dir: &Path,
    seed: u64,
    opts: &MixOptions,
) -> Result<MixedFile> {
    check_utterance_id(&entry.utterance_id)?;
    let clean = wav::read_wav(&entry.path)?;
    if clean.sample_rate_hz() != noise.sample_rate_hz() {
        return Err(Error::RateMismatch {
            left: clean.sample_rate_hz(),
            right: noise.sample_rate_hz(),
        });
    }
    // Every file starts the noise at its own seeded circular offset, so no
    // two outputs share a noise fingerprint even within a group.
    let mut rng = seed::file_stream(seed, &entry.utterance_id);
    let offset = rng.random_range(0..noise.len() as u64) as usize;
    let rotated = rotate(noise, offset);

    let target = SnrDb::new(target_db)?;
    let (noisy, beta) = signal::mix_at_snr(&clean, &rotated, target)?;
    let scaled_noise = signal::tile_to_length(&rotated, clean.len())?.scaled(beta)?;
    let achieved =
        signal::snr_db(signal::power(&clean)?, signal::power(&scaled_noise)?)?.value();

    let depth = if opts.keep_components {
        BitDepth::Float64
    } else {
        opts.bit_depth
    };
    let file_name = format!("{}.wav", entry.utterance_id);
    let stats = wav::write_wav(&out_dir.join(&file_name), &noisy, depth)?;
    if opts.keep_components {
        wav::write_wav(
            &out_dir.join(format!("{}.clean.wav", entry.utterance_id)),
            &clean,
            BitDepth::Float64,
        )?;
        wav::write_wav(
            &out_dir.join(format!("{}.noise.wav", entry.utterance_id)),
            &scaled_noise,
            BitDepth::Float64,
        )?;
    }
    Ok(MixedFile {
        entry: ManifestEntry {
            path: PathBuf::from(file_name),
            utterance_id: entry.utterance_id.clone(),
            speaker_id: entry.speaker_id.clone(),
            group: entry.group,
            split: entry.split,
            true_snr_db: Some(target_db),
        },
        achieved_snr_db: achieved,
        clipped_samples: stats.clipped_samples,
    })
}

/// Mixes every manifest entry with its group's noise at the SNR given by
/// `setting`, writing `<utterance_id>.wav` files plus `manifest.jsonl`
/// into `out_dir`. Per-file noise starts are seeded circular offsets into
/// the group noise. Entries are processed in parallel; the manifest is
/// written only after every file succeeded.
pub fn build_noisy_corpus(
    entries: &[ManifestEntry],
    noise_healthy: &Waveform,
    noise_pathological: &Waveform,
    setting: SnrSetting,
    out_dir: &Path,
    seed: u64,
    opts: &MixOptions,
) -> Result<Vec<MixedFile>> {
    if noise_healthy.is_empty() || noise_pathological.is_empty() {
        return Err(Error::InvalidInput("group noise signals must be non-empty".into()));
    }
    if noise_healthy.sample_rate_hz() != noise_pathological.sample_rate_hz() {
        return Err(Error::RateMismatch {
            left: noise_healthy.sample_rate_hz(),
            right: noise_pathological.sample_rate_hz(),
        });
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let results = exec::map(entries.to_vec(), |entry| {
        let (noise, target) = match entry.group {
            Group::Healthy => (noise_healthy, setting.healthy_snr_db()),
            Group::Pathological => (noise_pathological, setting.pathological_snr_db()),
        };
        mix_one(&entry, noise, target, out_dir, seed, opts)
    });
    let mixed: Vec<MixedFile> = results.into_iter().collect::<Result<_>>()?;

    let manifest: Vec<ManifestEntry> = mixed.iter().map(|m| m.entry.clone()).collect();
    save_manifest(&out_dir.join("manifest.jsonl"), &manifest)?;
    Ok(mixed)
}
