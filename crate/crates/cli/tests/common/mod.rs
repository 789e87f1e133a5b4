//! Helpers for driving the compiled binary from integration tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_noiseparity"))
}

/// Runs the binary with the given arguments and returns the raw output.
pub fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .output()
        .expect("binary spawns")
}

/// Runs the binary and asserts the exact exit code, echoing stderr on
/// mismatch so failures are diagnosable.
pub fn run_expecting(args: &[&str], code: i32) -> Output {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "noiseparity {args:?}\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
    out
}

pub struct CleanCorpus {
    pub manifest: PathBuf,
    pub noise_healthy: PathBuf,
    pub noise_pathological: PathBuf,
}

/// Builds a clean corpus through the binary itself: per-speaker
/// speech-like utterances (silent gaps) plus one white-noise bed per
/// group. Durations cycle so lengths differ within and across groups.
pub fn build_clean_corpus(
    dir: &Path,
    healthy: &[(f64, u64)],
    pathological: &[(f64, u64)],
) -> CleanCorpus {
    let noise_healthy = dir.join("noise_h.wav");
    let noise_pathological = dir.join("noise_p.wav");
    run_expecting(
        &[
            "--seed", "900", "synth", "--kind", "whitenoise", "--duration", "3.0",
            "--rms", "0.05", "--out", noise_healthy.to_str().expect("utf-8 path"),
        ],
        0,
    );
    run_expecting(
        &[
            "--seed", "901", "synth", "--kind", "whitenoise", "--duration", "2.3",
            "--rms", "0.08", "--out", noise_pathological.to_str().expect("utf-8 path"),
        ],
        0,
    );

    let mut manifest_text = String::new();
    let mut synth_one = |id: &str, group: &str, duration: f64, seed: u64| {
        let path = dir.join("clean").join(format!("{id}.wav"));
        run_expecting(
            &[
                "--seed", &seed.to_string(), "synth", "--kind", "speechlike",
                "--duration", &format!("{duration}"),
                "--out", path.to_str().expect("utf-8 path"),
            ],
            0,
        );
        writeln!(
            manifest_text,
            "{{\"path\":\"clean/{id}.wav\",\"utterance_id\":\"{id}\",\
             \"speaker_id\":\"spk-{id}\",\"group\":\"{group}\"}}"
        )
        .expect("string write");
    };
    for (i, &(duration, seed)) in healthy.iter().enumerate() {
        synth_one(&format!("h{i}"), "healthy", duration, seed);
    }
    for (i, &(duration, seed)) in pathological.iter().enumerate() {
        synth_one(&format!("p{i}"), "pathological", duration, seed);
    }

    let manifest = dir.join("clean.jsonl");
    std::fs::write(&manifest, manifest_text).expect("writable tempdir");
    CleanCorpus {
        manifest,
        noise_healthy,
        noise_pathological,
    }
}

/// Mixes the clean corpus at the given setting and returns the noisy
/// manifest path.
pub fn mix(corpus: &CleanCorpus, setting: &str, out_dir: &Path, extra: &[&str]) -> PathBuf {
    let mut args = vec![
        "--seed", "7", "mix",
        "--manifest", corpus.manifest.to_str().expect("utf-8 path"),
        "--noise-healthy", corpus.noise_healthy.to_str().expect("utf-8 path"),
        "--noise-pathological", corpus.noise_pathological.to_str().expect("utf-8 path"),
        "--setting", setting,
        "--out-dir", out_dir.to_str().expect("utf-8 path"),
    ];
    args.extend_from_slice(extra);
    run_expecting(&args, 0);
    out_dir.join("manifest.jsonl")
}

/// Parses a JSON report file.
pub fn read_json(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("cannot parse {}: {e}", path.display()))
}
