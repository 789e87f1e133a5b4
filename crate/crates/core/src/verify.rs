//! Measurement of the three SNR-matching condition residuals for augmented
//! pairs, in oracle mode (true clean/noise components known) and practical
//! mode (VAD-derived estimates only), plus the no-augmentation disparity
//! baseline.
//!
//! For a healthy/pathological pair augmented with each other's noise, the
//! three conditions compare, side by side:
//!   c1: healthy's own-noise SNR vs the injected healthy noise's SNR in the
//!       pathological signal;
//!   c2: the injected pathological noise's SNR in the healthy signal vs
//!       pathological's own-noise SNR;
//!   c3: the total-noise SNRs of both augmented signals.
//! Each residual is the left side minus the right side, in dB; all three
//! vanish when the scale factors are computed from exact clean powers and
//! the noise estimates carry their true powers.

use serde::{Deserialize, Serialize};

use crate::augment::{AugmentationOutcome, Group, Utterance};
use crate::error::{Error, Result};
use crate::signal::{self, Power, SnrDb, Waveform};

/// Which inputs a report was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    /// True components (available only for synthetic data).
    Oracle,
    /// VAD noise estimates and subtraction-based clean powers.
    Practical,
}

/// The two utterances a report is about.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairIds {
    pub healthy_id: String,
    pub pathological_id: String,
}

/// Residuals of the three SNR-matching conditions for one augmented pair.
///
/// The total-noise SNRs (condition 3) are computed under two conventions:
/// summing component powers (primary, exact when the noises are
/// uncorrelated) and measuring the power of the summed noise waveform
/// (reported so the cross-term is visible, never asserted to vanish).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub pair: PairIds,
    pub mode: VerifyMode,
    pub snr_h_own: SnrDb,
    pub snr_p_cross: SnrDb,
    pub snr_h_cross: SnrDb,
    pub snr_p_own: SnrDb,
    pub snr_h_total: SnrDb,
    pub snr_p_total: SnrDb,
    /// snr_h_own - snr_p_cross.
    pub residual_c1: f64,
    /// snr_h_cross - snr_p_own.
    pub residual_c2: f64,
    /// snr_h_total - snr_p_total, total noise as a sum of powers.
    pub residual_c3: f64,
    /// Condition-3 residual with total noise measured on the summed
    /// waveform instead; differs from `residual_c3` by the cross-term.
    pub residual_c3_waveform: f64,
    /// True when either side's clean power came from a clamped
    /// subtraction; such residuals deserve less confidence.
    pub degraded: bool,
}

/// One side of an oracle check: the true components of one augmented
/// utterance, with every waveform already at that utterance's length.
#[derive(Debug, Clone, Copy)]
pub struct OracleSide<'a> {
    pub id: &'a str,
    /// True clean speech s.
    pub clean: &'a Waveform,
    /// True own noise n.
    pub own_noise: &'a Waveform,
    /// The other side's noise estimate, length-adapted to this side.
    pub cross_estimate: &'a Waveform,
    /// Scale applied to `cross_estimate` during augmentation.
    pub alpha: f64,
}

impl OracleSide<'_> {
    fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidInput(format!(
                "alpha for '{}' must be positive and finite",
                self.id
            )));
        }
        if self.own_noise.len() != self.clean.len()
            || self.cross_estimate.len() != self.clean.len()
        {
            return Err(Error::InvalidInput(format!(
                "components of '{}' have mismatched lengths",
                self.id
            )));
        }
        Ok(())
    }

    fn powers(&self) -> Result<(Power, Power, Power)> {
        let p_clean = signal::power(self.clean)?;
        let p_own = signal::power(self.own_noise)?;
        let p_cross = signal::power(self.cross_estimate)?;
        for (name, p) in [("clean", p_clean), ("own noise", p_own), ("cross noise", p_cross)] {
            if p.value() <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "silent {name} component in '{}'",
                    self.id
                )));
            }
        }
        Ok((p_clean, p_own, p_cross))
    }
}

/// Inputs to the shared residual computation, one augmented side.
struct SidePowers {
    clean: Power,
    own_noise: Power,
    /// Power of the donor noise as added, before alpha scaling.
    cross_noise: Power,
    alpha: f64,
    /// Power of the summed total-noise waveform, when a waveform-level
    /// sum is available; falls back to the power sum otherwise.
    total_waveform: Option<Power>,
}

fn build_report(
    pair: PairIds,
    mode: VerifyMode,
    h: SidePowers,
    p: SidePowers,
    degraded: bool,
) -> Result<ConditionReport> {
    let scaled = |alpha: f64, p: Power| Power::new(alpha * alpha * p.value());

    let snr_h_own = signal::snr_db(h.clean, h.own_noise)?;
    let snr_p_cross = signal::snr_db(p.clean, scaled(p.alpha, p.cross_noise)?)?;
    let snr_h_cross = signal::snr_db(h.clean, scaled(h.alpha, h.cross_noise)?)?;
    let snr_p_own = signal::snr_db(p.clean, p.own_noise)?;

    let total_power = |s: &SidePowers| {
        Power::new(s.own_noise.value() + s.alpha * s.alpha * s.cross_noise.value())
    };
    let snr_h_total = signal::snr_db(h.clean, total_power(&h)?)?;
    let snr_p_total = signal::snr_db(p.clean, total_power(&p)?)?;

    let waveform_total = |s: &SidePowers| match s.total_waveform {
        Some(p) => Ok(p),
        None => total_power(s),
    };
    let snr_h_total_wf = signal::snr_db(h.clean, waveform_total(&h)?)?;
    let snr_p_total_wf = signal::snr_db(p.clean, waveform_total(&p)?)?;

    Ok(ConditionReport {
        pair,
        mode,
        snr_h_own,
        snr_p_cross,
        snr_h_cross,
        snr_p_own,
        snr_h_total,
        snr_p_total,
        residual_c1: snr_h_own.value() - snr_p_cross.value(),
        residual_c2: snr_h_cross.value() - snr_p_own.value(),
        residual_c3: snr_h_total.value() - snr_p_total.value(),
        residual_c3_waveform: snr_h_total_wf.value() - snr_p_total_wf.value(),
        degraded,
    })
}

/// Checks one augmented pair from its true components. All six SNRs come
/// from component powers; the waveform-sum total additionally measures
/// `own_noise + alpha * cross_estimate` directly.
pub fn check_pair_oracle(
    healthy: &OracleSide,
    pathological: &OracleSide,
) -> Result<ConditionReport> {
    healthy.validate()?;
    pathological.validate()?;
    let side = |s: &OracleSide| -> Result<SidePowers> {
        let (clean, own, cross) = s.powers()?;
        let summed = signal::add_scaled(s.own_noise, s.cross_estimate, s.alpha)?;
        Ok(SidePowers {
            clean,
            own_noise: own,
            cross_noise: cross,
            alpha: s.alpha,
            total_waveform: Some(signal::power(&summed)?),
        })
    };
    build_report(
        PairIds {
            healthy_id: healthy.id.to_string(),
            pathological_id: pathological.id.to_string(),
        },
        VerifyMode::Oracle,
        side(healthy)?,
        side(pathological)?,
        false,
    )
}

/// Checks one augmented pair from estimated quantities: each side's own
/// noise power is its VAD estimate's power, the injected-noise power and
/// alpha come from the recorded outcomes, and clean powers are the
/// subtraction-based estimates.
pub fn check_pair_practical(
    y_h: &Utterance,
    y_p: &Utterance,
    outcome_h: &AugmentationOutcome,
    outcome_p: &AugmentationOutcome,
) -> Result<ConditionReport> {
    if y_h.group != Group::Healthy || y_p.group != Group::Pathological {
        return Err(Error::MismatchedPair(format!(
            "expected (healthy, pathological), got ({}, {})",
            y_h.group.as_str(),
            y_p.group.as_str()
        )));
    }
    if outcome_h.receiver_id != y_h.id || outcome_p.receiver_id != y_p.id {
        return Err(Error::MismatchedPair(format!(
            "outcomes are for ('{}', '{}'), not ('{}', '{}')",
            outcome_h.receiver_id, outcome_p.receiver_id, y_h.id, y_p.id
        )));
    }
    if outcome_h.donor_id != y_p.id || outcome_p.donor_id != y_h.id {
        return Err(Error::MismatchedPair(format!(
            "pair ('{}', '{}') is not mutual: donors were '{}' and '{}'",
            y_h.id, y_p.id, outcome_h.donor_id, outcome_p.donor_id
        )));
    }
    let degraded = y_h.clean_power_clamped || y_p.clean_power_clamped;
    build_report(
        PairIds {
            healthy_id: y_h.id.clone(),
            pathological_id: y_p.id.clone(),
        },
        VerifyMode::Practical,
        practical_side_with_donor(y_h, y_p, outcome_h)?,
        practical_side_with_donor(y_p, y_h, outcome_p)?,
        degraded,
    )
}

fn practical_side_with_donor(
    receiver: &Utterance,
    donor: &Utterance,
    outcome: &AugmentationOutcome,
) -> Result<SidePowers> {
    let own = receiver.noise_estimate.as_ref().ok_or_else(|| {
        Error::MissingEstimate(format!("utterance '{}' has no noise estimate", receiver.id))
    })?;
    let clean = receiver.clean_power.ok_or_else(|| {
        Error::MissingEstimate(format!("utterance '{}' has no clean power", receiver.id))
    })?;
    let donor_noise = donor.noise_estimate.as_ref().ok_or_else(|| {
        Error::MissingEstimate(format!("utterance '{}' has no noise estimate", donor.id))
    })?;
    // Waveform-sum total noise: own estimate tiled to the utterance length
    // plus the donor estimate exactly as injected (tiled, scaled by alpha).
    let own_tiled = signal::tile_to_length(&own.noise, receiver.waveform.len())?;
    let donor_tiled = signal::tile_to_length(&donor_noise.noise, receiver.waveform.len())?;
    let summed = signal::add_scaled(&own_tiled, &donor_tiled, outcome.alpha)?;
    Ok(SidePowers {
        clean,
        own_noise: own.power,
        cross_noise: outcome.donor_noise_power,
        alpha: outcome.alpha,
        total_waveform: Some(signal::power(&summed)?),
    })
}

/// Per-condition aggregate over a batch of residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub mean_db: f64,
    /// Population standard deviation.
    pub std_db: f64,
    pub max_abs_db: f64,
}

fn residual_stats(values: &[f64]) -> ResidualStats {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    ResidualStats {
        mean_db: mean,
        std_db: var.sqrt(),
        max_abs_db: max_abs,
    }
}

/// Batch summary of condition reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub pairs: usize,
    pub degraded_pairs: usize,
    pub c1: ResidualStats,
    pub c2: ResidualStats,
    pub c3: ResidualStats,
    pub c3_waveform: ResidualStats,
}

impl VerifySummary {
    /// Largest primary residual magnitude across the three conditions.
    pub fn max_abs_residual_db(&self) -> f64 {
        self.c1
            .max_abs_db
            .max(self.c2.max_abs_db)
            .max(self.c3.max_abs_db)
    }
}

/// Aggregates a non-empty batch of reports: per-condition mean, standard
/// deviation, max |residual|, and the degraded-pair count.
pub fn summarize(reports: &[ConditionReport]) -> Result<VerifySummary> {
    if reports.is_empty() {
        return Err(Error::InvalidInput("no reports to summarize".into()));
    }
    let collect = |f: fn(&ConditionReport) -> f64| -> Vec<f64> {
        reports.iter().map(f).collect()
    };
    Ok(VerifySummary {
        pairs: reports.len(),
        degraded_pairs: reports.iter().filter(|r| r.degraded).count(),
        c1: residual_stats(&collect(|r| r.residual_c1)),
        c2: residual_stats(&collect(|r| r.residual_c2)),
        c3: residual_stats(&collect(|r| r.residual_c3)),
        c3_waveform: residual_stats(&collect(|r| r.residual_c3_waveform)),
    })
}

/// Group-level estimated-SNR statistics for the no-augmentation baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupSnrStats {
    pub count: usize,
    pub mean_db: f64,
    pub std_db: f64,
}

/// Estimated-SNR disparity between the groups before any augmentation:
/// the signature the augmentation exists to remove.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisparityReport {
    pub healthy: GroupSnrStats,
    pub pathological: GroupSnrStats,
    /// pathological mean minus healthy mean, in dB.
    pub gap_db: f64,
}

/// Computes per-group mean estimated SNR and the between-group gap.
/// Requires at least one utterance in each group.
pub fn measure_disparity(items: &[(Group, SnrDb)]) -> Result<DisparityReport> {
    let group_stats = |g: Group| -> Result<GroupSnrStats> {
        let values: Vec<f64> = items
            .iter()
            .filter(|(group, _)| *group == g)
            .map(|(_, snr)| snr.value())
            .collect();
        if values.is_empty() {
            return Err(Error::InvalidInput(format!(
                "no utterances in the {} group",
                g.as_str()
            )));
        }
        let stats = residual_stats(&values);
        Ok(GroupSnrStats {
            count: values.len(),
            mean_db: stats.mean_db,
            std_db: stats.std_db,
        })
    };
    let healthy = group_stats(Group::Healthy)?;
    let pathological = group_stats(Group::Pathological)?;
    Ok(DisparityReport {
        healthy,
        pathological,
        gap_db: pathological.mean_db - healthy.mean_db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::{augment_utterance, cross_noise_scale};
    use crate::vad::NoiseEstimate;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn wf(samples: Vec<f64>) -> Waveform {
        Waveform::new(samples, 16_000).unwrap()
    }

    fn white(rms: f64, len: usize, seed: u64) -> Waveform {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = Normal::new(0.0, rms).unwrap();
        wf((0..len).map(|_| dist.sample(&mut rng)).collect())
    }

    fn tone(amp: f64, freq: f64, len: usize) -> Waveform {
        wf((0..len)
            .map(|i| amp * (2.0 * std::f64::consts::PI * freq * i as f64 / 16_000.0).sin())
            .collect())
    }

    /// Builds a synthetic oracle pair with exact estimates and the
    /// equalizing alphas, returning everything the checks need.
    fn oracle_pair(
        len_h: usize,
        len_p: usize,
        seed: u64,
    ) -> (
        Waveform,
        Waveform,
        Waveform,
        Waveform,
        Waveform,
        Waveform,
        f64,
        f64,
    ) {
        let s_h = tone(0.4, 210.0, len_h);
        let s_p = tone(0.2, 170.0, len_p);
        let n_h = white(0.04, len_h, seed);
        let n_p = white(0.01, len_p, seed + 1);
        let p_s_h = signal::power(&s_h).unwrap();
        let p_s_p = signal::power(&s_p).unwrap();
        let alpha_h = cross_noise_scale(p_s_h, p_s_p).unwrap();
        let alpha_p = cross_noise_scale(p_s_p, p_s_h).unwrap();
        // Length-adapt each estimate to the other side while preserving its
        // power exactly, so the equal-power assumption holds by construction.
        let nhat_p_at_h = signal::power_preserving_tile(&n_p, len_h).unwrap();
        let nhat_h_at_p = signal::power_preserving_tile(&n_h, len_p).unwrap();
        (s_h, n_h, nhat_p_at_h, s_p, n_p, nhat_h_at_p, alpha_h, alpha_p)
    }

    #[test]
    fn oracle_residuals_vanish_with_exact_components() {
        for (len_h, len_p, seed) in [(16_000, 16_000, 2), (16_000, 24_000, 3), (9_000, 4_000, 4)]
        {
            let (s_h, n_h, nhat_p, s_p, n_p, nhat_h, alpha_h, alpha_p) =
                oracle_pair(len_h, len_p, seed);
            let report = check_pair_oracle(
                &OracleSide {
                    id: "h",
                    clean: &s_h,
                    own_noise: &n_h,
                    cross_estimate: &nhat_p,
                    alpha: alpha_h,
                },
                &OracleSide {
                    id: "p",
                    clean: &s_p,
                    own_noise: &n_p,
                    cross_estimate: &nhat_h,
                    alpha: alpha_p,
                },
            )
            .unwrap();
            assert!(report.residual_c1.abs() < 1e-9, "c1 = {}", report.residual_c1);
            assert!(report.residual_c2.abs() < 1e-9, "c2 = {}", report.residual_c2);
            assert!(report.residual_c3.abs() < 1e-9, "c3 = {}", report.residual_c3);
            assert_eq!(report.mode, VerifyMode::Oracle);
            assert!(!report.degraded);
        }
    }

    #[test]
    fn oracle_full_symmetry_is_exactly_zero() {
        let s = tone(0.3, 250.0, 8_000);
        let n = white(0.02, 8_000, 9);
        let report = check_pair_oracle(
            &OracleSide {
                id: "h",
                clean: &s,
                own_noise: &n,
                cross_estimate: &n,
                alpha: 1.0,
            },
            &OracleSide {
                id: "p",
                clean: &s,
                own_noise: &n,
                cross_estimate: &n,
                alpha: 1.0,
            },
        )
        .unwrap();
        assert_eq!(report.residual_c1, 0.0);
        assert_eq!(report.residual_c2, 0.0);
        assert_eq!(report.residual_c3, 0.0);
        assert_eq!(report.residual_c3_waveform, 0.0);
    }

    #[test]
    fn waveform_sum_residual_is_small_for_independent_noises() {
        // One-second independent white noises: the cross-term shifts the
        // waveform-sum total power only slightly.
        let (s_h, n_h, nhat_p, s_p, n_p, nhat_h, alpha_h, alpha_p) =
            oracle_pair(16_000, 16_000, 12);
        let report = check_pair_oracle(
            &OracleSide {
                id: "h",
                clean: &s_h,
                own_noise: &n_h,
                cross_estimate: &nhat_p,
                alpha: alpha_h,
            },
            &OracleSide {
                id: "p",
                clean: &s_p,
                own_noise: &n_p,
                cross_estimate: &nhat_h,
                alpha: alpha_p,
            },
        )
        .unwrap();
        assert!(
            report.residual_c3_waveform.abs() <= 0.1,
            "waveform-sum c3 = {}",
            report.residual_c3_waveform
        );
    }

    #[test]
    fn oracle_rejects_silent_components_and_bad_alpha() {
        let s = tone(0.3, 250.0, 8_000);
        let n = white(0.02, 8_000, 1);
        let silent = wf(vec![0.0; 8_000]);
        let good = OracleSide {
            id: "h",
            clean: &s,
            own_noise: &n,
            cross_estimate: &n,
            alpha: 1.0,
        };
        let silent_side = OracleSide {
            id: "p",
            clean: &silent,
            own_noise: &n,
            cross_estimate: &n,
            alpha: 1.0,
        };
        assert!(check_pair_oracle(&good, &silent_side).is_err());
        let bad_alpha = OracleSide { alpha: -1.0, ..good };
        assert!(check_pair_oracle(&bad_alpha, &good).is_err());
    }

    fn practical_pair() -> (Utterance, Utterance, AugmentationOutcome, AugmentationOutcome) {
        let len_h = 16_000;
        let len_p = 12_000;
        let s_h = tone(0.4, 210.0, len_h);
        let s_p = tone(0.2, 170.0, len_p);
        let n_h = white(0.04, len_h, 31);
        let n_p = white(0.01, len_p, 32);
        let y_h = signal::add_scaled(&s_h, &n_h, 1.0).unwrap();
        let y_p = signal::add_scaled(&s_p, &n_p, 1.0).unwrap();
        let est = |w: &Waveform, id: &str| NoiseEstimate {
            noise: w.clone(),
            power: signal::power(w).unwrap(),
            source_id: id.to_string(),
            noise_fraction: 0.5,
        };
        let mut utt_h = Utterance {
            id: "h".into(),
            group: Group::Healthy,
            waveform: y_h,
            noise_estimate: Some(est(&n_h, "h")),
            clean_power: Some(signal::power(&s_h).unwrap()),
            clean_power_clamped: false,
        };
        let mut utt_p = Utterance {
            id: "p".into(),
            group: Group::Pathological,
            waveform: y_p,
            noise_estimate: Some(est(&n_p, "p")),
            clean_power: Some(signal::power(&s_p).unwrap()),
            clean_power_clamped: false,
        };
        let out_h = augment_utterance(
            &utt_h,
            utt_p.noise_estimate.as_ref().unwrap(),
            utt_p.clean_power.unwrap(),
        )
        .unwrap();
        let out_p = augment_utterance(
            &utt_p,
            utt_h.noise_estimate.as_ref().unwrap(),
            utt_h.clean_power.unwrap(),
        )
        .unwrap();
        // Augmentation preserves length, so the utterances may carry either
        // the original or the augmented waveform for verification.
        utt_h.waveform = out_h.augmented.clone();
        utt_p.waveform = out_p.augmented.clone();
        (utt_h, utt_p, out_h, out_p)
    }

    #[test]
    fn practical_reduces_to_oracle_with_exact_estimates() {
        let (utt_h, utt_p, out_h, out_p) = practical_pair();
        let practical = check_pair_practical(&utt_h, &utt_p, &out_h, &out_p).unwrap();

        let n_h = &utt_h.noise_estimate.as_ref().unwrap().noise;
        let n_p = &utt_p.noise_estimate.as_ref().unwrap().noise;
        let s_h = tone(0.4, 210.0, 16_000);
        let s_p = tone(0.2, 170.0, 12_000);
        let nhat_p_at_h = signal::tile_to_length(n_p, 16_000).unwrap();
        let nhat_h_at_p = signal::tile_to_length(n_h, 12_000).unwrap();
        let oracle = check_pair_oracle(
            &OracleSide {
                id: "h",
                clean: &s_h,
                own_noise: n_h,
                cross_estimate: &nhat_p_at_h,
                alpha: out_h.alpha,
            },
            &OracleSide {
                id: "p",
                clean: &s_p,
                own_noise: n_p,
                cross_estimate: &nhat_h_at_p,
                alpha: out_p.alpha,
            },
        )
        .unwrap();

        assert_abs_diff_eq!(practical.residual_c1, oracle.residual_c1, epsilon = 1e-12);
        assert_abs_diff_eq!(practical.residual_c2, oracle.residual_c2, epsilon = 1e-12);
        assert_abs_diff_eq!(practical.residual_c3, oracle.residual_c3, epsilon = 1e-12);
        assert_abs_diff_eq!(
            practical.residual_c3_waveform,
            oracle.residual_c3_waveform,
            epsilon = 1e-12
        );
        assert_eq!(practical.mode, VerifyMode::Practical);
    }

    #[test]
    fn practical_flags_degraded_pairs() {
        let (mut utt_h, utt_p, out_h, out_p) = practical_pair();
        utt_h.clean_power_clamped = true;
        let report = check_pair_practical(&utt_h, &utt_p, &out_h, &out_p).unwrap();
        assert!(report.degraded);
    }

    #[test]
    fn practical_rejects_missing_estimates_and_mismatched_pairs() {
        let (utt_h, utt_p, out_h, out_p) = practical_pair();

        let mut stripped = utt_h.clone();
        stripped.noise_estimate = None;
        assert!(matches!(
            check_pair_practical(&stripped, &utt_p, &out_h, &out_p),
            Err(Error::MissingEstimate(_))
        ));

        let mut no_clean = utt_p.clone();
        no_clean.clean_power = None;
        assert!(matches!(
            check_pair_practical(&utt_h, &no_clean, &out_h, &out_p),
            Err(Error::MissingEstimate(_))
        ));

        assert!(matches!(
            check_pair_practical(&utt_h, &utt_p, &out_p, &out_h),
            Err(Error::MismatchedPair(_))
        ));
        assert!(matches!(
            check_pair_practical(&utt_p, &utt_h, &out_p, &out_h),
            Err(Error::MismatchedPair(_))
        ));
    }

    fn toy_report(c1: f64, c2: f64, c3: f64, degraded: bool) -> ConditionReport {
        let snr = SnrDb::new(20.0).unwrap();
        ConditionReport {
            pair: PairIds {
                healthy_id: "h".into(),
                pathological_id: "p".into(),
            },
            mode: VerifyMode::Oracle,
            snr_h_own: snr,
            snr_p_cross: snr,
            snr_h_cross: snr,
            snr_p_own: snr,
            snr_h_total: snr,
            snr_p_total: snr,
            residual_c1: c1,
            residual_c2: c2,
            residual_c3: c3,
            residual_c3_waveform: c3,
            degraded,
        }
    }

    #[test]
    fn summarize_single_report() {
        let summary = summarize(&[toy_report(0.5, -0.25, 0.1, true)]).unwrap();
        assert_eq!(summary.pairs, 1);
        assert_eq!(summary.degraded_pairs, 1);
        assert_eq!(summary.c1.mean_db, 0.5);
        assert_eq!(summary.c1.std_db, 0.0);
        assert_eq!(summary.c1.max_abs_db, 0.5);
        assert_eq!(summary.c2.mean_db, -0.25);
    }

    #[test]
    fn summarize_symmetric_pair() {
        let summary = summarize(&[
            toy_report(0.75, 0.0, 0.0, false),
            toy_report(-0.75, 0.0, 0.0, false),
        ])
        .unwrap();
        assert_eq!(summary.c1.mean_db, 0.0);
        assert_eq!(summary.c1.max_abs_db, 0.75);
        assert_eq!(summary.c1.std_db, 0.75);
        assert_eq!(summary.degraded_pairs, 0);
        assert_abs_diff_eq!(summary.max_abs_residual_db(), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn summarize_rejects_empty_input() {
        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn disparity_gap_and_group_stats() {
        let snr = |v: f64| SnrDb::new(v).unwrap();
        let items = vec![
            (Group::Healthy, snr(19.5)),
            (Group::Healthy, snr(20.5)),
            (Group::Pathological, snr(39.0)),
            (Group::Pathological, snr(41.0)),
        ];
        let report = measure_disparity(&items).unwrap();
        assert_eq!(report.healthy.count, 2);
        assert_abs_diff_eq!(report.healthy.mean_db, 20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.pathological.mean_db, 40.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.gap_db, 20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.healthy.std_db, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn disparity_requires_both_groups() {
        let items = vec![(Group::Healthy, SnrDb::new(20.0).unwrap())];
        assert!(measure_disparity(&items).is_err());
    }
}
