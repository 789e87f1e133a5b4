//! `augment`: cross-inject noise estimates between the groups.
//!
//! Output directory layout (everything a later `verify --mode practical`
//! run consumes):
//!
//! - `<utterance_id>.wav` — the augmented audio, one per usable utterance
//! - `manifest.jsonl` — manifest of the augmented corpus
//! - `plan.json` — the receiver/donor pairing for this seed and epoch
//! - `outcomes.jsonl` — alpha and powers actually applied per receiver
//! - `estimates.jsonl` + `estimates/<utterance_id>.wav` — the per-utterance
//!   noise/clean estimates (64-bit float, lossless)
//! - `skips.json` — utterances excluded from augmentation, with reasons

use std::collections::HashMap;
use std::path::PathBuf;

use serde::Serialize;

use noiseparity::{
    analyze_utterance, augment_utterance, load_manifest, make_pairing, read_wav, save_manifest,
    write_wav, Group, ManifestEntry, Utterance,
};

use crate::config::RunConfig;
use crate::records::{self, EstimateRecord, OutcomeRecord, SkipRecord};
use crate::report::{self, SCHEMA_VERSION};
use crate::{AppError, AppResult, AugmentArgs};

#[derive(Serialize)]
struct SkipsDoc<'a> {
    schema_version: u32,
    total_utterances: usize,
    skipped: &'a [SkipRecord],
}

pub fn run(cfg: &RunConfig, args: &AugmentArgs) -> AppResult<()> {
    let entries = load_manifest(&args.manifest)?;
    if entries.is_empty() {
        return Err(AppError::runtime(format!(
            "manifest {} lists no utterances",
            args.manifest.display()
        )));
    }
    let epoch = args.epoch.unwrap_or(cfg.epoch);
    let bit_depth = args.bit_depth.unwrap_or(cfg.bit_depth);
    let total = entries.len();

    std::fs::create_dir_all(args.out_dir.join("estimates"))
        .map_err(|e| AppError::runtime(format!("cannot create {}: {e}", args.out_dir.display())))?;

    // Estimate noise and clean power for every utterance.
    let vad = cfg.vad.clone();
    let analyzed = noiseparity::exec::map(entries, move |entry| {
        let result = read_wav(&entry.path).and_then(|waveform| {
            let analysis = analyze_utterance(&waveform, &vad, &entry.utterance_id)?;
            Ok((waveform, analysis))
        });
        (entry, result)
    });

    let mut utterances: Vec<Utterance> = Vec::new();
    let mut estimates: Vec<EstimateRecord> = Vec::new();
    let mut meta: HashMap<String, ManifestEntry> = HashMap::new();
    let mut skips: Vec<SkipRecord> = Vec::new();
    for (entry, result) in analyzed {
        let (waveform, analysis) = match result {
            Ok(pair) => pair,
            Err(e) => {
                skips.push(SkipRecord {
                    utterance_id: entry.utterance_id,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        if analysis.noise.power.value() <= 0.0 {
            skips.push(SkipRecord {
                utterance_id: entry.utterance_id,
                reason: "extracted noise estimate is digital silence".into(),
            });
            continue;
        }
        if analysis.clean.clamped {
            log::warn!(
                "cmd=augment event=clean_power_clamped utterance={} noise_power={:e} total_power={:e}",
                entry.utterance_id,
                analysis.noise.power.value(),
                analysis.total_power.value(),
            );
        }
        // Cannot fail: noise power was just checked to be positive.
        let snr = analysis.estimated_snr_db().expect("noise power is positive");
        estimates.push(EstimateRecord {
            utterance_id: entry.utterance_id.clone(),
            group: entry.group,
            sample_rate_hz: waveform.sample_rate_hz(),
            num_samples: waveform.len(),
            total_power: analysis.total_power.value(),
            noise_power: analysis.noise.power.value(),
            noise_fraction: analysis.noise.noise_fraction,
            clean_power: analysis.clean.power.value(),
            clean_power_clamped: analysis.clean.clamped,
            estimated_snr_db: snr.value(),
        });
        utterances.push(Utterance {
            id: entry.utterance_id.clone(),
            group: entry.group,
            waveform,
            noise_estimate: Some(analysis.noise),
            clean_power: Some(analysis.clean.power),
            clean_power_clamped: analysis.clean.clamped,
        });
        meta.insert(entry.utterance_id.clone(), entry);
    }

    report::write_json(
        &args.out_dir.join("skips.json"),
        &SkipsDoc {
            schema_version: SCHEMA_VERSION,
            total_utterances: total,
            skipped: &skips,
        },
    )?;
    if skips.len() * 2 > total {
        return Err(AppError::runtime(format!(
            "{} of {} utterances unusable (see {}); refusing to augment a mostly-skipped corpus",
            skips.len(),
            total,
            args.out_dir.join("skips.json").display(),
        )));
    }
    if let Some(w) = utterances.windows(2).find(|w| {
        w[0].waveform.sample_rate_hz() != w[1].waveform.sample_rate_hz()
    }) {
        return Err(AppError::Runtime(
            noiseparity::Error::RateMismatch {
                left: w[0].waveform.sample_rate_hz(),
                right: w[1].waveform.sample_rate_hz(),
            }
            .to_string(),
        ));
    }

    let ids_of = |g: Group| -> Vec<String> {
        utterances
            .iter()
            .filter(|u| u.group == g)
            .map(|u| u.id.clone())
            .collect()
    };
    let plan = make_pairing(
        &ids_of(Group::Healthy),
        &ids_of(Group::Pathological),
        cfg.seed,
        epoch,
    )?;
    let index: HashMap<&str, usize> = utterances
        .iter()
        .enumerate()
        .map(|(i, u)| (u.id.as_str(), i))
        .collect();

    // Augment and write each receiver's file; assignments are independent.
    let assignments = plan.assignments.clone();
    let utterances = &utterances;
    let out_dir = &args.out_dir;
    let results = noiseparity::exec::map(assignments, move |a| -> AppResult<OutcomeRecord> {
        let receiver = &utterances[index[a.receiver_id.as_str()]];
        let donor = &utterances[index[a.donor_id.as_str()]];
        let donor_noise = donor.noise_estimate.as_ref().expect("usable utterances carry estimates");
        let donor_clean = donor.clean_power.expect("usable utterances carry clean power");
        let outcome = augment_utterance(receiver, donor_noise, donor_clean)?;
        let stats = write_wav(
            &out_dir.join(format!("{}.wav", receiver.id)),
            &outcome.augmented,
            bit_depth,
        )?;
        Ok(OutcomeRecord {
            receiver_id: outcome.receiver_id,
            donor_id: outcome.donor_id,
            alpha: outcome.alpha,
            donor_noise_power: outcome.donor_noise_power.value(),
            receiver_clean_power: outcome.receiver_clean_power.value(),
            clipped_samples: stats.clipped_samples,
        })
    });
    let outcomes = results.into_iter().collect::<AppResult<Vec<_>>>()?;

    for u in utterances {
        let estimate = u.noise_estimate.as_ref().expect("usable utterances carry estimates");
        write_wav(
            &out_dir.join("estimates").join(format!("{}.wav", u.id)),
            &estimate.noise,
            noiseparity::BitDepth::Float64,
        )?;
    }

    let manifest: Vec<ManifestEntry> = outcomes
        .iter()
        .map(|o| {
            let original = &meta[&o.receiver_id];
            ManifestEntry {
                path: PathBuf::from(format!("{}.wav", o.receiver_id)),
                utterance_id: original.utterance_id.clone(),
                speaker_id: original.speaker_id.clone(),
                group: original.group,
                split: original.split,
                // The mix-time SNR no longer describes the file.
                true_snr_db: None,
            }
        })
        .collect();
    save_manifest(&out_dir.join("manifest.jsonl"), &manifest)?;
    report::write_json(&out_dir.join("plan.json"), &plan)?;
    records::write_jsonl(&out_dir.join("outcomes.jsonl"), &outcomes)?;
    records::write_jsonl(&out_dir.join("estimates.jsonl"), &estimates)?;

    let clipped: usize = outcomes.iter().map(|o| o.clipped_samples).sum();
    if clipped > 0 {
        log::warn!("cmd=augment event=clipping clipped_samples={clipped}");
    }
    log::info!(
        "cmd=augment epoch={} augmented={} skipped={} out_dir={}",
        epoch,
        outcomes.len(),
        skips.len(),
        out_dir.display(),
    );
    Ok(())
}
