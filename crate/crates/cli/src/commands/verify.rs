//! `verify`: measure the SNR-matching residuals, or the no-augmentation
//! disparity baseline.
//!
//! Oracle mode rebuilds each pair from the exact clean/noise components a
//! `mix --keep-components` run stored, length-adapting the cross noise
//! with a power-preserving tile so the equal-power assumption behind the
//! matching conditions holds exactly; residuals are then numerical noise
//! and the default tolerance is 1e-9 dB. Practical mode replays an
//! `augment` run from its stored estimates, cross-checks the stored
//! outcomes against the recomputation, and completes each assignment into
//! a mutual pair by augmenting the reverse direction; residuals then
//! carry real estimation error and the default tolerance is 2 dB.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use noiseparity::{
    check_pair_oracle, check_pair_practical, cross_noise_scale, load_manifest, make_pairing,
    measure_disparity, power, power_preserving_tile, read_wav, snr_db, ConditionReport,
    DisparityReport, Group, ManifestEntry, NoiseEstimate, OracleSide, PairingPlan, Power, SnrDb,
    Utterance, VerifySummary, Waveform,
};

use crate::config::RunConfig;
use crate::records::{read_jsonl, EstimateRecord, OutcomeRecord};
use crate::report::{self, SCHEMA_VERSION};
use crate::{AppError, AppResult, ModeArg, VerifyArgs};

const DEFAULT_ORACLE_TOLERANCE_DB: f64 = 1e-9;
const DEFAULT_PRACTICAL_TOLERANCE_DB: f64 = 2.0;

#[derive(Serialize)]
struct ResidualDoc<'a> {
    schema_version: u32,
    mode: &'a str,
    tolerance_db: f64,
    passed: bool,
    summary: &'a VerifySummary,
    pairs: &'a [ConditionReport],
}

#[derive(Serialize)]
struct BaselineUtterance {
    utterance_id: String,
    group: Group,
    estimated_snr_db: f64,
    noise_fraction: f64,
    clean_power_clamped: bool,
}

#[derive(Serialize)]
struct BaselineDoc<'a> {
    schema_version: u32,
    mode: &'a str,
    utterances: &'a [BaselineUtterance],
    disparity: &'a DisparityReport,
}

pub fn run(cfg: &RunConfig, args: &VerifyArgs) -> AppResult<()> {
    let tolerance = match args.tolerance_db {
        Some(t) if !(t.is_finite() && t >= 0.0) => {
            return Err(AppError::usage(format!(
                "--tolerance-db must be finite and non-negative, got {t}"
            )));
        }
        other => other,
    };
    match args.mode {
        ModeArg::Oracle => {
            let reports = oracle_reports(cfg, args)?;
            finish(args, "oracle", tolerance.unwrap_or(DEFAULT_ORACLE_TOLERANCE_DB), &reports)
        }
        ModeArg::Practical => {
            let reports = practical_reports(args)?;
            finish(args, "practical", tolerance.unwrap_or(DEFAULT_PRACTICAL_TOLERANCE_DB), &reports)
        }
        ModeArg::Baseline => baseline(cfg, args),
    }
}

/// Summarizes, writes the report file, and turns the tolerance check into
/// the exit code.
fn finish(
    args: &VerifyArgs,
    mode: &str,
    tolerance_db: f64,
    reports: &[ConditionReport],
) -> AppResult<()> {
    let summary = noiseparity::summarize(reports)?;
    let max_abs = summary.max_abs_residual_db();
    let passed = max_abs <= tolerance_db;
    report::write_json(
        &args.report,
        &ResidualDoc {
            schema_version: SCHEMA_VERSION,
            mode,
            tolerance_db,
            passed,
            summary: &summary,
            pairs: reports,
        },
    )?;
    log::info!(
        "cmd=verify mode={mode} pairs={} degraded_pairs={} max_abs_residual_db={max_abs:e} \
         tolerance_db={tolerance_db:e} passed={passed} report={}",
        summary.pairs,
        summary.degraded_pairs,
        args.report.display(),
    );
    if passed {
        Ok(())
    } else {
        Err(AppError::runtime(format!(
            "max |residual| {max_abs:e} dB exceeds tolerance {tolerance_db:e} dB (see {})",
            args.report.display()
        )))
    }
}

/// True components of one mixed file, read from its sidecars.
struct OracleComponents {
    entry: ManifestEntry,
    clean: Waveform,
    noise: Waveform,
    clean_power: Power,
}

fn oracle_reports(cfg: &RunConfig, args: &VerifyArgs) -> AppResult<Vec<ConditionReport>> {
    let dir = args
        .corpus
        .as_ref()
        .ok_or_else(|| AppError::usage("--corpus is required in oracle mode"))?;
    let entries = load_manifest(&dir.join("manifest.jsonl"))?;

    // The exact components only exist if the corpus was mixed with
    // --keep-components; a missing sidecar is a setup problem, not a
    // runtime failure.
    let mut components = Vec::with_capacity(entries.len());
    for entry in entries {
        let clean_path = sidecar(&entry.path, "clean.wav");
        let noise_path = sidecar(&entry.path, "noise.wav");
        for p in [&clean_path, &noise_path] {
            if !p.exists() {
                return Err(AppError::usage(format!(
                    "missing component sidecar {} (was the corpus mixed with --keep-components?)",
                    p.display()
                )));
            }
        }
        let clean = read_wav(&clean_path)?;
        let noise = read_wav(&noise_path)?;
        let clean_power = power(&clean)?;
        components.push(OracleComponents {
            entry,
            clean,
            noise,
            clean_power,
        });
    }

    let plan = match &args.plan {
        Some(path) => load_plan(path)?,
        None => {
            let ids_of = |g: Group| -> Vec<String> {
                components
                    .iter()
                    .filter(|c| c.entry.group == g)
                    .map(|c| c.entry.utterance_id.clone())
                    .collect()
            };
            make_pairing(
                &ids_of(Group::Healthy),
                &ids_of(Group::Pathological),
                cfg.seed,
                args.epoch.unwrap_or(cfg.epoch),
            )?
        }
    };
    let index: HashMap<&str, usize> = components
        .iter()
        .enumerate()
        .map(|(i, c)| (c.entry.utterance_id.as_str(), i))
        .collect();

    let mut reports = Vec::with_capacity(plan.assignments.len());
    for a in &plan.assignments {
        let receiver = lookup(&components, &index, &a.receiver_id)?;
        let donor = lookup(&components, &index, &a.donor_id)?;
        let (h, p) = match (receiver.entry.group, donor.entry.group) {
            (Group::Healthy, Group::Pathological) => (receiver, donor),
            (Group::Pathological, Group::Healthy) => (donor, receiver),
            (left, _) => {
                return Err(AppError::runtime(format!(
                    "assignment {} <- {} pairs two {} utterances",
                    a.receiver_id,
                    a.donor_id,
                    left.as_str(),
                )));
            }
        };
        // The cross estimates: each side's true noise, length-adapted to
        // the other side at exactly its original power.
        let cross_h = power_preserving_tile(&p.noise, h.clean.len())?;
        let cross_p = power_preserving_tile(&h.noise, p.clean.len())?;
        let alpha_h = cross_noise_scale(h.clean_power, p.clean_power)?;
        let alpha_p = cross_noise_scale(p.clean_power, h.clean_power)?;
        let report = check_pair_oracle(
            &OracleSide {
                id: &h.entry.utterance_id,
                clean: &h.clean,
                own_noise: &h.noise,
                cross_estimate: &cross_h,
                alpha: alpha_h,
            },
            &OracleSide {
                id: &p.entry.utterance_id,
                clean: &p.clean,
                own_noise: &p.noise,
                cross_estimate: &cross_p,
                alpha: alpha_p,
            },
        )?;
        reports.push(report);
    }
    Ok(reports)
}

fn practical_reports(args: &VerifyArgs) -> AppResult<Vec<ConditionReport>> {
    let dir = args
        .augmented
        .as_ref()
        .ok_or_else(|| AppError::usage("--augmented is required in practical mode"))?;
    let entries = load_manifest(&dir.join("manifest.jsonl"))?;
    let plan = load_plan(&dir.join("plan.json"))?;
    let estimates: Vec<EstimateRecord> = read_jsonl(&dir.join("estimates.jsonl"))?;
    let outcomes: Vec<OutcomeRecord> = read_jsonl(&dir.join("outcomes.jsonl"))?;

    let paths: HashMap<&str, &PathBuf> = entries
        .iter()
        .map(|e| (e.utterance_id.as_str(), &e.path))
        .collect();
    let mut utterances: HashMap<String, Utterance> = HashMap::new();
    for rec in &estimates {
        let path = paths.get(rec.utterance_id.as_str()).ok_or_else(|| {
            AppError::runtime(format!(
                "estimate for '{}' has no entry in the augmented manifest",
                rec.utterance_id
            ))
        })?;
        // Only the waveform's length matters below (it fixes the tiling
        // target); the augmented audio has the receiver's exact length.
        let waveform = read_wav(path)?;
        let noise = read_wav(&dir.join("estimates").join(format!("{}.wav", rec.utterance_id)))?;
        utterances.insert(
            rec.utterance_id.clone(),
            Utterance {
                id: rec.utterance_id.clone(),
                group: rec.group,
                waveform,
                noise_estimate: Some(NoiseEstimate {
                    noise,
                    power: Power::new(rec.noise_power)?,
                    source_id: rec.utterance_id.clone(),
                    noise_fraction: rec.noise_fraction,
                }),
                clean_power: Some(Power::new(rec.clean_power)?),
                clean_power_clamped: rec.clean_power_clamped,
            },
        );
    }
    let recorded: HashMap<&str, &OutcomeRecord> = outcomes
        .iter()
        .map(|o| (o.receiver_id.as_str(), o))
        .collect();

    let mut reports = Vec::with_capacity(plan.assignments.len());
    for a in &plan.assignments {
        let receiver = utterances.get(&a.receiver_id).ok_or_else(|| {
            AppError::runtime(format!("plan names '{}' but no estimate was stored for it", a.receiver_id))
        })?;
        let donor = utterances.get(&a.donor_id).ok_or_else(|| {
            AppError::runtime(format!("plan names '{}' but no estimate was stored for it", a.donor_id))
        })?;

        // Replay the recorded direction and complete the mutual pair by
        // augmenting the reverse direction from the same estimates.
        let forward = replay_augment(receiver, donor)?;
        let reverse = replay_augment(donor, receiver)?;
        let rec = recorded.get(a.receiver_id.as_str()).copied().ok_or_else(|| {
            AppError::runtime(format!("no stored outcome for receiver '{}'", a.receiver_id))
        })?;
        check_replay(rec, &forward)?;

        let (y_h, y_p, outcome_h, outcome_p) = match (receiver.group, donor.group) {
            (Group::Healthy, Group::Pathological) => (receiver, donor, &forward, &reverse),
            (Group::Pathological, Group::Healthy) => (donor, receiver, &reverse, &forward),
            (left, _) => {
                return Err(AppError::runtime(format!(
                    "assignment {} <- {} pairs two {} utterances",
                    a.receiver_id,
                    a.donor_id,
                    left.as_str(),
                )));
            }
        };
        reports.push(check_pair_practical(y_h, y_p, outcome_h, outcome_p)?);
    }
    Ok(reports)
}

fn replay_augment(
    receiver: &Utterance,
    donor: &Utterance,
) -> AppResult<noiseparity::AugmentationOutcome> {
    let donor_noise = donor
        .noise_estimate
        .as_ref()
        .expect("stored utterances carry estimates");
    let donor_clean = donor.clean_power.expect("stored utterances carry clean power");
    Ok(noiseparity::augment_utterance(receiver, donor_noise, donor_clean)?)
}

/// The stored record and the replay derive from bit-identical inputs
/// (64-bit float estimate files, shortest-round-trip JSON powers), so any
/// disagreement means the directory's files are stale or hand-edited.
fn check_replay(rec: &OutcomeRecord, replay: &noiseparity::AugmentationOutcome) -> AppResult<()> {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    if rec.donor_id != replay.donor_id
        || !close(rec.alpha, replay.alpha)
        || !close(rec.donor_noise_power, replay.donor_noise_power.value())
        || !close(rec.receiver_clean_power, replay.receiver_clean_power.value())
    {
        return Err(AppError::runtime(format!(
            "stored outcome for '{}' disagrees with its replay; the augment \
             directory is stale or inconsistent",
            rec.receiver_id
        )));
    }
    Ok(())
}

fn baseline(cfg: &RunConfig, args: &VerifyArgs) -> AppResult<()> {
    let manifest = args
        .manifest
        .as_ref()
        .ok_or_else(|| AppError::usage("--manifest is required in baseline mode"))?;
    let entries = load_manifest(manifest)?;
    if entries.is_empty() {
        return Err(AppError::runtime(format!(
            "manifest {} lists no utterances",
            manifest.display()
        )));
    }
    let vad = cfg.vad.clone();
    let analyzed = noiseparity::exec::map(entries, move |entry| {
        let result = read_wav(&entry.path).and_then(|w| {
            let analysis = noiseparity::analyze_utterance(&w, &vad, &entry.utterance_id)?;
            let snr = snr_db(analysis.clean.power, analysis.noise.power)?;
            Ok((analysis, snr))
        });
        (entry, result)
    });

    let mut rows = Vec::with_capacity(analyzed.len());
    let mut items: Vec<(Group, SnrDb)> = Vec::with_capacity(analyzed.len());
    for (entry, result) in analyzed {
        let (analysis, snr) = result.map_err(|e| {
            AppError::runtime(format!("cannot estimate '{}': {e}", entry.utterance_id))
        })?;
        items.push((entry.group, snr));
        rows.push(BaselineUtterance {
            utterance_id: entry.utterance_id,
            group: entry.group,
            estimated_snr_db: snr.value(),
            noise_fraction: analysis.noise.noise_fraction,
            clean_power_clamped: analysis.clean.clamped,
        });
    }
    let disparity = measure_disparity(&items)?;
    report::write_json(
        &args.report,
        &BaselineDoc {
            schema_version: SCHEMA_VERSION,
            mode: "baseline",
            utterances: &rows,
            disparity: &disparity,
        },
    )?;
    log::info!(
        "cmd=verify mode=baseline utterances={} healthy_mean_db={:.3} pathological_mean_db={:.3} \
         gap_db={:.3} report={}",
        rows.len(),
        disparity.healthy.mean_db,
        disparity.pathological.mean_db,
        disparity.gap_db,
        args.report.display(),
    );
    Ok(())
}

fn load_plan(path: &Path) -> AppResult<PairingPlan> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::runtime(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| AppError::runtime(format!("cannot parse {}: {e}", path.display())))
}

fn lookup<'a>(
    components: &'a [OracleComponents],
    index: &HashMap<&str, usize>,
    id: &str,
) -> AppResult<&'a OracleComponents> {
    index
        .get(id)
        .map(|&i| &components[i])
        .ok_or_else(|| AppError::runtime(format!("plan names '{id}' but the corpus has no such utterance")))
}

/// `dir/name.wav` -> `dir/name.<suffix>`.
fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    path.with_extension(suffix)
}
