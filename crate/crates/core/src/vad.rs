//! Energy-based voice activity detection, extraction of noise-only
//! segments, and clean-speech power estimation.
//!
//! The detector is a percentile-floor energy gate: a frame counts as speech
//! when its short-time energy exceeds the quiet-floor percentile of all
//! frame energies by a configurable margin. Deterministic, parameter-light,
//! and adequate for relatively stationary noise, which is the regime this
//! pipeline assumes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{self, Power, Waveform};

/// Energy floor added inside the log so silent frames stay finite:
/// `10 * log10(0 + EPS_FLOOR) = -120 dB`.
const EPS_FLOOR: f64 = 1e-12;

/// Fraction of the total power reported as "clean" when noise-power
/// subtraction would go non-positive.
const EPS_CLAMP: f64 = 1e-6;

/// Framing and thresholding parameters for the energy VAD.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VadConfig {
    /// Analysis frame length in milliseconds.
    pub frame_ms: f64,
    /// Hop between frame starts in milliseconds.
    pub hop_ms: f64,
    /// Percentile of frame energies taken as the quiet floor, in [0, 100].
    pub floor_percentile: f64,
    /// Margin above the floor beyond which a frame counts as speech.
    pub threshold_db_above_floor: f64,
    /// Minimum number of noise frames required for a usable estimate.
    pub min_noise_frames: usize,
}

impl Default for VadConfig {
    fn default() -> Self {
        VadConfig {
            frame_ms: 25.0,
            hop_ms: 10.0,
            floor_percentile: 5.0,
            threshold_db_above_floor: 6.0,
            min_noise_frames: 5,
        }
    }
}

impl VadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.frame_ms.is_finite() && self.frame_ms > 0.0) {
            return Err(Error::InvalidInput("frame_ms must be positive".into()));
        }
        if !(self.hop_ms.is_finite() && self.hop_ms > 0.0) {
            return Err(Error::InvalidInput("hop_ms must be positive".into()));
        }
        if self.hop_ms > self.frame_ms {
            return Err(Error::InvalidInput(format!(
                "hop_ms ({}) must not exceed frame_ms ({})",
                self.hop_ms, self.frame_ms
            )));
        }
        if !(0.0..=100.0).contains(&self.floor_percentile) {
            return Err(Error::InvalidInput(format!(
                "floor_percentile must be in [0, 100], got {}",
                self.floor_percentile
            )));
        }
        if !self.threshold_db_above_floor.is_finite() {
            return Err(Error::InvalidInput("threshold_db_above_floor must be finite".into()));
        }
        if self.min_noise_frames == 0 {
            return Err(Error::InvalidInput("min_noise_frames must be at least 1".into()));
        }
        Ok(())
    }

    pub fn frame_len_samples(&self, sample_rate_hz: u32) -> usize {
        (self.frame_ms / 1000.0 * sample_rate_hz as f64).round() as usize
    }

    pub fn hop_samples(&self, sample_rate_hz: u32) -> usize {
        (self.hop_ms / 1000.0 * sample_rate_hz as f64).round() as usize
    }
}

/// Per-frame classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameLabel {
    Speech,
    Noise,
}

/// Per-frame speech/noise labeling with the frame geometry it was
/// computed under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VadMask {
    pub frame_labels: Vec<FrameLabel>,
    pub frame_len_samples: usize,
    pub hop_samples: usize,
    pub total_samples: usize,
}

impl VadMask {
    pub fn num_frames(&self) -> usize {
        self.frame_labels.len()
    }

    pub fn noise_frames(&self) -> usize {
        self.frame_labels
            .iter()
            .filter(|l| **l == FrameLabel::Noise)
            .count()
    }

    /// Fraction of frames labeled Noise; 0 for an empty mask.
    pub fn noise_fraction(&self) -> f64 {
        if self.frame_labels.is_empty() {
            0.0
        } else {
            self.noise_frames() as f64 / self.frame_labels.len() as f64
        }
    }
}

/// VAD-extracted noise-only signal with its measured power: the noise
/// estimate and its power for one utterance.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseEstimate {
    /// Concatenated noise-only samples.
    pub noise: Waveform,
    /// Power of `noise`.
    pub power: Power,
    /// Utterance the noise was extracted from.
    pub source_id: String,
    /// Fraction of frames labeled Noise, in [0, 1].
    pub noise_fraction: f64,
}

/// Clean-power estimate by power subtraction, with a flag recording
/// whether the subtraction had to be clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CleanPowerEstimate {
    pub power: Power,
    /// True when the noise power met or exceeded the total power and the
    /// estimate fell back to `EPS_CLAMP * P_total`. Downstream confidence
    /// in this utterance is degraded.
    pub clamped: bool,
}

fn frame_geometry(w: &Waveform, cfg: &VadConfig) -> Result<(usize, usize, usize)> {
    cfg.validate()?;
    let frame_len = cfg.frame_len_samples(w.sample_rate_hz());
    let hop = cfg.hop_samples(w.sample_rate_hz());
    if frame_len == 0 || hop == 0 {
        return Err(Error::InvalidInput(format!(
            "frame geometry collapses to zero samples at {} Hz",
            w.sample_rate_hz()
        )));
    }
    if w.len() < frame_len {
        return Err(Error::TooShort {
            samples: w.len(),
            needed: frame_len,
        });
    }
    let num_frames = (w.len() - frame_len) / hop + 1;
    Ok((frame_len, hop, num_frames))
}

/// Short-time energies in dB: per frame, `10 * log10(mean_square + 1e-12)`
/// under a rectangular window. Partial tail frames are dropped.
pub fn frame_energies(w: &Waveform, cfg: &VadConfig) -> Result<Vec<f64>> {
    let (frame_len, hop, num_frames) = frame_geometry(w, cfg)?;
    let samples = w.samples();
    let energies = (0..num_frames)
        .map(|i| {
            let frame = &samples[i * hop..i * hop + frame_len];
            let ms = frame.iter().map(|s| s * s).sum::<f64>() / frame_len as f64;
            10.0 * (ms + EPS_FLOOR).log10()
        })
        .collect();
    Ok(energies)
}

/// Percentile of `values` with linear interpolation between order
/// statistics. `p` in [0, 100]; `values` non-empty.
fn percentile(values: &[f64], p: f64) -> f64 {
    debug_assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let rank = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Labels each frame Speech iff its energy exceeds the quiet floor (the
/// `floor_percentile`-th percentile of all frame energies) by more than
/// `threshold_db_above_floor`. Deterministic.
pub fn detect_speech(w: &Waveform, cfg: &VadConfig) -> Result<VadMask> {
    let (frame_len, hop, _) = frame_geometry(w, cfg)?;
    let energies = frame_energies(w, cfg)?;
    let floor = percentile(&energies, cfg.floor_percentile);
    let cut = floor + cfg.threshold_db_above_floor;
    let frame_labels = energies
        .iter()
        .map(|&e| {
            if e > cut {
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
        total_samples: w.len(),
    })
}

/// Concatenates the samples of all Noise-labeled frames into the noise
/// estimate for `w`. Frames overlap when `hop < frame`, so each frame
/// contributes only its leading hop-length slice — consecutive noise frames
/// then yield contiguous, non-overlapping audio with no double counting.
pub fn extract_noise(
    w: &Waveform,
    mask: &VadMask,
    cfg: &VadConfig,
    source_id: &str,
) -> Result<NoiseEstimate> {
    if mask.total_samples != w.len() {
        return Err(Error::InvalidInput(format!(
            "mask covers {} samples but waveform has {}",
            mask.total_samples,
            w.len()
        )));
    }
    let noise_frames = mask.noise_frames();
    if noise_frames < cfg.min_noise_frames {
        return Err(Error::InsufficientNoise {
            source_id: source_id.to_string(),
            found: noise_frames,
            needed: cfg.min_noise_frames,
        });
    }
    let samples = w.samples();
    let mut noise = Vec::with_capacity(noise_frames * mask.hop_samples);
    for (i, label) in mask.frame_labels.iter().enumerate() {
        if *label == FrameLabel::Noise {
            let start = i * mask.hop_samples;
            let end = (start + mask.hop_samples).min(samples.len());
            noise.extend_from_slice(&samples[start..end]);
        }
    }
    let noise = Waveform::from_finite(noise, w.sample_rate_hz());
    let power = signal::power(&noise)?;
    Ok(NoiseEstimate {
        noise,
        power,
        source_id: source_id.to_string(),
        noise_fraction: mask.noise_fraction(),
    })
}

/// Clean-speech power by power subtraction: `P_y - P_n` when positive,
/// otherwise the clamped fallback `1e-6 * P_y` with `clamped` set. The
/// clamp is defined behavior, not an error: noise overestimates must not
/// abort a batch, but they must be visible downstream.
pub fn estimate_clean_power(total: Power, noise: Power) -> Result<CleanPowerEstimate> {
    if total.value() <= 0.0 {
        return Err(Error::InvalidInput("total power must be positive".into()));
    }
    let diff = total.value() - noise.value();
    if diff > 0.0 {
        Ok(CleanPowerEstimate {
            power: Power::new(diff)?,
            clamped: false,
        })
    } else {
        Ok(CleanPowerEstimate {
            power: Power::new(EPS_CLAMP * total.value())?,
            clamped: true,
        })
    }
}

/// Everything the pipeline needs to know about one utterance: its VAD mask,
/// total power, noise estimate, and clean-power estimate.
#[derive(Debug, Clone)]
pub struct UtteranceAnalysis {
    pub mask: VadMask,
    pub total_power: Power,
    pub noise: NoiseEstimate,
    pub clean: CleanPowerEstimate,
}

impl UtteranceAnalysis {
    /// Estimated SNR in dB from the estimated clean and noise powers.
    /// Errors when the extracted noise is digital silence.
    pub fn estimated_snr_db(&self) -> Result<crate::signal::SnrDb> {
        signal::snr_db(self.clean.power, self.noise.power)
    }
}

/// Runs the full per-utterance estimation chain: VAD, noise extraction,
/// total power, and clean-power subtraction.
pub fn analyze_utterance(w: &Waveform, cfg: &VadConfig, source_id: &str) -> Result<UtteranceAnalysis> {
    let mask = detect_speech(w, cfg)?;
    let noise = extract_noise(w, &mask, cfg, source_id)?;
    let total_power = signal::power(w)?;
    if total_power.value() <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "utterance '{source_id}' is digital silence"
        )));
    }
    let clean = estimate_clean_power(total_power, noise.power)?;
    Ok(UtteranceAnalysis {
        mask,
        total_power,
        noise,
        clean,
    })
}
