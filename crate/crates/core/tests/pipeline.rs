//! End-to-end pipeline tests against real files: synthesize, mix, reload,
//! estimate, augment, and verify, all through the public library API.

use std::path::Path;

use noiseparity::{
    analyze_utterance, augment_utterance, build_noisy_corpus, check_pair_practical,
    generate_synthetic, load_manifest, measure_disparity, read_wav, write_wav, BitDepth, Group,
    ManifestEntry, MixOptions, SnrDb, SnrSetting, SynthKind, SynthSpec, Utterance, VadConfig,
    Waveform,
};

const RATE: u32 = 16_000;

fn speech_like(seed: u64, duration_s: f64) -> Waveform {
    let spec = SynthSpec {
        kind: SynthKind::SpeechLike {
            burst_ms: 500.0,
            gap_ms: 500.0,
            mod_rate_hz: 4.0,
            carrier_hz: 220.0,
            amplitude: 0.3,
            noise_snr_db: None,
        },
        duration_s,
        sample_rate_hz: RATE,
        seed,
    };
    generate_synthetic(&spec).expect("valid spec").waveform
}

fn white_noise(seed: u64, rms: f64, duration_s: f64) -> Waveform {
    let spec = SynthSpec {
        kind: SynthKind::WhiteNoise { rms },
        duration_s,
        sample_rate_hz: RATE,
        seed,
    };
    generate_synthetic(&spec).expect("valid spec").waveform
}

/// Writes clean speech-like utterances to disk and returns their manifest
/// entries: three healthy and three pathological speakers, lengths all
/// different so cross-group tiling is exercised in both directions.
fn write_clean_corpus(dir: &Path) -> Vec<ManifestEntry> {
    let layout: &[(&str, Group, f64, u64)] = &[
        ("h0", Group::Healthy, 4.0, 50),
        ("h1", Group::Healthy, 3.5, 51),
        ("h2", Group::Healthy, 3.8, 52),
        ("p0", Group::Pathological, 3.2, 60),
        ("p1", Group::Pathological, 4.0, 61),
        ("p2", Group::Pathological, 3.6, 62),
    ];
    layout
        .iter()
        .map(|&(id, group, duration, seed)| {
            let path = dir.join(format!("{id}.wav"));
            write_wav(&path, &speech_like(seed, duration), BitDepth::Float64)
                .expect("writable tempdir");
            ManifestEntry {
                path,
                utterance_id: id.to_string(),
                speaker_id: format!("spk-{id}"),
                group,
                split: None,
                true_snr_db: None,
            }
        })
        .collect()
}

#[test]
fn noisy_corpus_round_trips_through_manifest_and_files() {
    let dir = tempfile::tempdir().expect("tempdir");
    let clean = write_clean_corpus(dir.path());
    let noise_h = white_noise(70, 0.05, 3.0);
    let noise_p = white_noise(71, 0.08, 2.3);
    let out_dir = dir.path().join("noisy");
    build_noisy_corpus(
        &clean,
        &noise_h,
        &noise_p,
        SnrSetting::C,
        &out_dir,
        9,
        &MixOptions::default(),
    )
    .expect("mix succeeds");

    // Reload through the manifest as a downstream consumer would.
    let entries = load_manifest(&out_dir.join("manifest.jsonl")).expect("manifest loads");
    assert_eq!(entries.len(), clean.len());
    let cfg = VadConfig::default();
    for entry in &entries {
        let expected = match entry.group {
            Group::Healthy => 20.0,
            Group::Pathological => 40.0,
        };
        assert_eq!(entry.true_snr_db, Some(expected));
        let w = read_wav(&entry.path).expect("resolved path readable");
        let analysis = analyze_utterance(&w, &cfg, &entry.utterance_id).expect("analyzable");
        let estimated = analysis.estimated_snr_db().expect("noise present").value();
        assert!(
            (estimated - expected).abs() <= 1.0,
            "{}: estimated {estimated} dB against true {expected} dB",
            entry.utterance_id
        );
    }
}

#[test]
fn augmentation_suppresses_the_group_snr_gap() {
    let dir = tempfile::tempdir().expect("tempdir");
    let clean = write_clean_corpus(dir.path());
    let noise_h = white_noise(80, 0.05, 3.0);
    let noise_p = white_noise(81, 0.08, 2.3);
    let out_dir = dir.path().join("noisy");
    build_noisy_corpus(
        &clean,
        &noise_h,
        &noise_p,
        SnrSetting::C,
        &out_dir,
        9,
        &MixOptions::default(),
    )
    .expect("mix succeeds");
    let entries = load_manifest(&out_dir.join("manifest.jsonl")).expect("manifest loads");

    // Before augmentation the groups sit 20 dB apart: the disparity a
    // classifier could exploit as a shortcut.
    let cfg = VadConfig::default();
    let mut utterances = Vec::new();
    let mut estimated: Vec<(Group, SnrDb)> = Vec::new();
    for entry in &entries {
        let w = read_wav(&entry.path).expect("readable");
        let analysis = analyze_utterance(&w, &cfg, &entry.utterance_id).expect("analyzable");
        estimated.push((entry.group, analysis.estimated_snr_db().expect("noise present")));
        utterances.push(Utterance {
            id: entry.utterance_id.clone(),
            group: entry.group,
            waveform: w,
            noise_estimate: Some(analysis.noise),
            clean_power: Some(analysis.clean.power),
            clean_power_clamped: analysis.clean.clamped,
        });
    }
    let disparity = measure_disparity(&estimated).expect("both groups present");
    assert!(
        (disparity.gap_db - 20.0).abs() <= 1.0,
        "baseline gap {} dB, expected 20 +/- 1",
        disparity.gap_db
    );

    // After mutual cross-injection the three SNR-matching conditions hold
    // to within the practical tolerance on every pair.
    let (healthy, pathological): (Vec<_>, Vec<_>) =
        utterances.into_iter().partition(|u| u.group == Group::Healthy);
    for (h, p) in healthy.iter().zip(&pathological) {
        let outcome_h = augment_utterance(
            h,
            p.noise_estimate.as_ref().expect("estimated"),
            p.clean_power.expect("estimated"),
        )
        .expect("augmentable");
        let outcome_p = augment_utterance(
            p,
            h.noise_estimate.as_ref().expect("estimated"),
            h.clean_power.expect("estimated"),
        )
        .expect("augmentable");
        let report = check_pair_practical(h, p, &outcome_h, &outcome_p).expect("mutual pair");
        assert!(!report.degraded, "pair ({}, {}) degraded", h.id, p.id);
        for (name, residual) in [
            ("c1", report.residual_c1),
            ("c2", report.residual_c2),
            ("c3", report.residual_c3),
        ] {
            assert!(
                residual.abs() <= 2.0,
                "pair ({}, {}) residual {name} = {residual} dB",
                h.id,
                p.id
            );
        }
    }
}
