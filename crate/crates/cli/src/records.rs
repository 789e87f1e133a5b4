//! On-disk record types connecting `augment` runs to later `verify` runs.
//!
//! Every numeric field is a finite f64 serialized by serde_json, whose
//! shortest-round-trip encoding reproduces the value bit for bit — so a
//! verify run recomputing the same quantities from the stored estimates
//! can cross-check the stored records exactly.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use noiseparity::Group;

use crate::{AppError, AppResult};

/// Per-utterance noise/clean estimate, one line of `estimates.jsonl`.
/// The estimate's samples live in `estimates/<utterance_id>.wav` (64-bit
/// float, lossless).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub utterance_id: String,
    pub group: Group,
    pub sample_rate_hz: u32,
    pub num_samples: usize,
    pub total_power: f64,
    pub noise_power: f64,
    pub noise_fraction: f64,
    pub clean_power: f64,
    pub clean_power_clamped: bool,
    pub estimated_snr_db: f64,
}

/// One augmentation, one line of `outcomes.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub receiver_id: String,
    pub donor_id: String,
    pub alpha: f64,
    /// Power of the donor noise tiled to the receiver's length, before
    /// scaling by alpha.
    pub donor_noise_power: f64,
    pub receiver_clean_power: f64,
    /// Samples hard-clipped by integer encoding (0 for float output).
    pub clipped_samples: usize,
}

/// An utterance excluded from augmentation, one element of `skips.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub utterance_id: String,
    pub reason: String,
}

/// Writes records as JSON Lines, atomically.
pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> AppResult<()> {
    let mut out = Vec::new();
    for item in items {
        let line = serde_json::to_vec(item)
            .map_err(|e| AppError::runtime(format!("cannot encode {}: {e}", path.display())))?;
        out.extend_from_slice(&line);
        out.push(b'\n');
    }
    noiseparity::atomic_write_bytes(path, &out)?;
    Ok(())
}

/// Reads a JSON Lines file, skipping blank lines; errors name the
/// offending line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> AppResult<Vec<T>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut items = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(line).map_err(|e| {
            AppError::runtime(format!("{} line {}: {e}", path.display(), i + 1))
        })?;
        items.push(item);
    }
    Ok(items)
}
