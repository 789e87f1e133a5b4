//! Cross-group noise augmentation: the SNR-equalizing scale factor, the
//! noise-injection step itself, and per-epoch randomized donor pairing.
//!
//! Each utterance in one group receives the noise estimate of a randomly
//! chosen utterance from the other group, scaled so that the injected
//! noise lands at the same SNR relative to both groups' clean speech. The
//! scale factor depends only on the two clean powers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;
use crate::signal::{self, Power, Waveform};
use crate::vad::NoiseEstimate;

/// Which population an utterance belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Healthy,
    Pathological,
}

impl Group {
    pub fn opposite(self) -> Group {
        match self {
            Group::Healthy => Group::Pathological,
            Group::Pathological => Group::Healthy,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Group::Healthy => "healthy",
            Group::Pathological => "pathological",
        }
    }
}

/// One utterance flowing through the pipeline, with whatever estimates
/// have been attached to it so far.
#[derive(Debug, Clone)]
pub struct Utterance {
    pub id: String,
    pub group: Group,
    pub waveform: Waveform,
    pub noise_estimate: Option<NoiseEstimate>,
    pub clean_power: Option<Power>,
    /// True when `clean_power` came from a clamped subtraction; carried
    /// through so verification can flag the pair as degraded.
    pub clean_power_clamped: bool,
}

/// Result of injecting a donor's noise into a receiver, with enough
/// provenance to verify the SNR-matching conditions afterwards.
#[derive(Debug, Clone)]
pub struct AugmentationOutcome {
    pub augmented: Waveform,
    /// The scale applied to the donor noise.
    pub alpha: f64,
    pub receiver_id: String,
    pub donor_id: String,
    /// Power of the donor noise as added (tiled to the receiver's length,
    /// before scaling by alpha).
    pub donor_noise_power: Power,
    pub receiver_clean_power: Power,
}

/// One receiver-donor assignment within a pairing plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub receiver_id: String,
    pub donor_id: String,
}

/// Deterministic donor assignment for one epoch: every utterance in each
/// group receives a donor drawn uniformly (with replacement) from the
/// opposite group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingPlan {
    pub seed: u64,
    pub epoch: u64,
    pub assignments: Vec<Assignment>,
}

/// SNR-equalizing scale for injecting the donor's noise into the receiver:
/// `alpha = sqrt(P_s_receiver / P_s_donor)`. The receiver with the stronger
/// clean speech gets proportionally stronger noise, so the injected noise
/// sits at the same SNR on both sides.
pub fn cross_noise_scale(receiver_clean: Power, donor_clean: Power) -> Result<f64> {
    if receiver_clean.value() <= 0.0 {
        return Err(Error::InvalidInput("receiver clean power must be positive".into()));
    }
    if donor_clean.value() <= 0.0 {
        return Err(Error::InvalidInput("donor clean power must be positive".into()));
    }
    Ok((receiver_clean.value() / donor_clean.value()).sqrt())
}

/// Adds the donor's noise estimate (tiled to the receiver's length, scaled
/// by [`cross_noise_scale`]) to the receiver's waveform.
pub fn augment_utterance(
    receiver: &Utterance,
    donor_noise: &NoiseEstimate,
    donor_clean_power: Power,
) -> Result<AugmentationOutcome> {
    let receiver_clean_power = receiver.clean_power.ok_or_else(|| {
        Error::MissingEstimate(format!("utterance '{}' has no clean power", receiver.id))
    })?;
    if receiver.waveform.sample_rate_hz() != donor_noise.noise.sample_rate_hz() {
        return Err(Error::RateMismatch {
            left: receiver.waveform.sample_rate_hz(),
            right: donor_noise.noise.sample_rate_hz(),
        });
    }
    if donor_noise.noise.is_empty() {
        return Err(Error::InvalidInput(format!(
            "donor '{}' has an empty noise estimate",
            donor_noise.source_id
        )));
    }
    let alpha = cross_noise_scale(receiver_clean_power, donor_clean_power)?;
    let tiled = signal::tile_to_length(&donor_noise.noise, receiver.waveform.len())?;
    let donor_noise_power = signal::power(&tiled)?;
    let augmented = signal::add_scaled(&receiver.waveform, &tiled, alpha)?;
    Ok(AugmentationOutcome {
        augmented,
        alpha,
        receiver_id: receiver.id.clone(),
        donor_id: donor_noise.source_id.clone(),
        donor_noise_power,
        receiver_clean_power,
    })
}

/// Builds the donor assignment for `(seed, epoch)`. Healthy receivers are
/// listed first, in input order, then pathological receivers; each draws a
/// donor uniformly at random with replacement from the other group. The
/// same inputs always produce the same plan.
pub fn make_pairing(
    healthy_ids: &[String],
    pathological_ids: &[String],
    seed: u64,
    epoch: u64,
) -> Result<PairingPlan> {
    if healthy_ids.is_empty() {
        return Err(Error::InvalidInput("healthy group is empty".into()));
    }
    if pathological_ids.is_empty() {
        return Err(Error::InvalidInput("pathological group is empty".into()));
    }
    let mut rng = seed::plan_stream(seed, epoch);
    let mut assignments =
        Vec::with_capacity(healthy_ids.len() + pathological_ids.len());
    for receiver_id in healthy_ids {
        let donor = &pathological_ids[rng.random_range(0..pathological_ids.len())];
        assignments.push(Assignment {
            receiver_id: receiver_id.clone(),
            donor_id: donor.clone(),
        });
    }
    for receiver_id in pathological_ids {
        let donor = &healthy_ids[rng.random_range(0..healthy_ids.len())];
        assignments.push(Assignment {
            receiver_id: receiver_id.clone(),
            donor_id: donor.clone(),
        });
    }
    Ok(PairingPlan {
        seed,
        epoch,
        assignments,
    })
}
