//! Fundamental signal arithmetic: power, SNR, scaling, mixing at a target
//! SNR, and length adaptation of noise signals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mono sample buffer with its sample rate. The universal signal carrier.
///
/// Samples are dimensionless amplitudes, nominally in `[-1, 1]`, stored as
/// `f64` regardless of the bit depth of any file they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl Waveform {
    /// Builds a waveform, rejecting a zero sample rate and non-finite samples.
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz == 0 {
            return Err(Error::InvalidInput("sample rate must be positive".into()));
        }
        if let Some(pos) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite sample at index {pos}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    /// Internal constructor for samples already known to be finite.
    pub(crate) fn from_finite(samples: Vec<f64>, sample_rate_hz: u32) -> Self {
        debug_assert!(sample_rate_hz > 0);
        debug_assert!(samples.iter().all(|s| s.is_finite()));
        Self {
            samples,
            sample_rate_hz,
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    /// Returns a copy with every sample multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Waveform> {
        if !factor.is_finite() {
            return Err(Error::InvalidInput("scale factor must be finite".into()));
        }
        Ok(Waveform::from_finite(
            self.samples.iter().map(|s| s * factor).collect(),
            self.sample_rate_hz,
        ))
    }
}

/// Mean squared amplitude of a signal. Non-negative and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Power(f64);

impl Power {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidInput(format!(
                "power must be finite and non-negative, got {value}"
            )));
        }
        Ok(Power(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Signal-to-noise ratio in decibels.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SnrDb(f64);

impl SnrDb {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidInput(format!("SNR must be finite, got {value}")));
        }
        Ok(SnrDb(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Neumaier-compensated sum of squares. Long buffers accumulate enough
/// rounding error under naive summation to disturb sub-1e-9 dB residual
/// checks downstream, so power always goes through this.
fn compensated_sum_of_squares(samples: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &x in samples {
        let sq = x * x;
        let t = sum + sq;
        if sum.abs() >= sq.abs() {
            comp += (sum - t) + sq;
        } else {
            comp += (sq - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean squared amplitude of `w`. Independent of the sample rate.
pub fn power(w: &Waveform) -> Result<Power> {
    if w.is_empty() {
        return Err(Error::InvalidInput(
            "cannot compute power of an empty waveform".into(),
        ));
    }
    let ms = compensated_sum_of_squares(w.samples()) / w.len() as f64;
    Power::new(ms)
}

/// SNR in dB of a signal with the given clean power against the given
/// noise power: `10 * log10(P_signal / P_noise)`.
pub fn snr_db(signal_power: Power, noise_power: Power) -> Result<SnrDb> {
    if signal_power.value() <= 0.0 {
        return Err(Error::InvalidInput("signal power must be positive".into()));
    }
    if noise_power.value() <= 0.0 {
        return Err(Error::InvalidInput("noise power must be positive".into()));
    }
    SnrDb::new(10.0 * (signal_power.value() / noise_power.value()).log10())
}

/// Scale factor to apply to a noise signal of power `noise_power` so that
/// mixing it into a signal of power `clean_power` lands at `target` dB:
/// `beta = sqrt(P_clean / (P_noise * 10^(target/10)))`.
pub fn snr_scale(clean_power: Power, noise_power: Power, target: SnrDb) -> Result<f64> {
    if clean_power.value() <= 0.0 {
        return Err(Error::InvalidInput("clean power must be positive".into()));
    }
    if noise_power.value() <= 0.0 {
        return Err(Error::InvalidInput("noise power must be positive".into()));
    }
    let ratio = 10f64.powf(target.value() / 10.0);
    Ok((clean_power.value() / (noise_power.value() * ratio)).sqrt())
}

/// Tiles `noise` by repetition (and truncation) to exactly `target_len`
/// samples. Sample `i` of the output is sample `i % len(noise)` of the
/// input. Hard concatenation, no crossfade at the seams.
pub fn tile_to_length(noise: &Waveform, target_len: usize) -> Result<Waveform> {
    if noise.is_empty() {
        return Err(Error::InvalidInput("cannot tile an empty waveform".into()));
    }
    if target_len == 0 {
        return Err(Error::InvalidInput("target length must be at least 1".into()));
    }
    let src = noise.samples();
    let out: Vec<f64> = (0..target_len).map(|i| src[i % src.len()]).collect();
    Ok(Waveform::from_finite(out, noise.sample_rate_hz()))
}

/// Sample-wise `base + alpha * addend`. Lengths and sample rates must match.
pub fn add_scaled(base: &Waveform, addend: &Waveform, alpha: f64) -> Result<Waveform> {
    if base.sample_rate_hz() != addend.sample_rate_hz() {
        return Err(Error::RateMismatch {
            left: base.sample_rate_hz(),
            right: addend.sample_rate_hz(),
        });
    }
    if base.len() != addend.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: {} vs {}",
            base.len(),
            addend.len()
        )));
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidInput("alpha must be finite".into()));
    }
    let out: Vec<f64> = base
        .samples()
        .iter()
        .zip(addend.samples())
        .map(|(&b, &a)| b + alpha * a)
        .collect();
    Ok(Waveform::from_finite(out, base.sample_rate_hz()))
}

/// Mixes `noise` into `clean` at `target_snr_db`. The noise is tiled to the
/// clean signal's length, scaled by the beta from [`snr_scale`] (computed on
/// the tiled noise), and added sample-wise. Returns the mixture and beta.
///
/// No peak normalization or clipping happens here; clipping policy belongs
/// to file writing.
pub fn mix_at_snr(
    clean: &Waveform,
    noise: &Waveform,
    target_snr_db: SnrDb,
) -> Result<(Waveform, f64)> {
    if clean.sample_rate_hz() != noise.sample_rate_hz() {
        return Err(Error::RateMismatch {
            left: clean.sample_rate_hz(),
            right: noise.sample_rate_hz(),
        });
    }
    if noise.is_empty() {
        return Err(Error::InvalidInput("noise is empty".into()));
    }
    let p_clean = power(clean)?;
    let tiled = tile_to_length(noise, clean.len())?;
    let p_noise = power(&tiled)?;
    if p_clean.value() <= 0.0 {
        return Err(Error::InvalidInput("clean signal is silent".into()));
    }
    if p_noise.value() <= 0.0 {
        return Err(Error::InvalidInput("noise signal is silent".into()));
    }
    let beta = snr_scale(p_clean, p_noise, target_snr_db)?;
    let noisy = add_scaled(clean, &tiled, beta)?;
    Ok((noisy, beta))
}

/// Tiles `noise` to `target_len` and rescales the result so its power equals
/// the power of the source exactly (up to rounding). Plain tiling truncates
/// the final repetition, which perturbs the power of the adapted signal;
/// this variant removes that perturbation.
pub fn power_preserving_tile(noise: &Waveform, target_len: usize) -> Result<Waveform> {
    let p_src = power(noise)?;
    let tiled = tile_to_length(noise, target_len)?;
    let p_tiled = power(&tiled)?;
    if p_src.value() <= 0.0 || p_tiled.value() <= 0.0 {
        return Err(Error::InvalidInput("cannot power-match a silent signal".into()));
    }
    tiled.scaled((p_src.value() / p_tiled.value()).sqrt())
}
