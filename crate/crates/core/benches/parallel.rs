//! Parallel-vs-sequential throughput of the batch stages: per-utterance
//! VAD analysis, noise mixing, and oracle condition checks. `exec::map`
//! dispatches on the `parallel` feature (rayon when enabled), while
//! `exec::map_seq` is always the plain sequential loop, so the two series
//! show exactly what the feature buys on this machine.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use noiseparity::signal::{self, SnrDb, Waveform};
use noiseparity::vad::{self, VadConfig};
use noiseparity::verify::{check_pair_oracle, OracleSide};
use noiseparity::{exec, generate_synthetic, SynthKind, SynthSpec};

const BATCH: usize = 32;

fn speech_like_batch(noise_snr_db: Option<f64>) -> Vec<Waveform> {
    (0..BATCH)
        .map(|i| {
            let spec = SynthSpec {
                kind: SynthKind::SpeechLike {
                    burst_ms: 300.0,
                    gap_ms: 300.0,
                    mod_rate_hz: 4.0,
                    carrier_hz: 180.0 + 10.0 * i as f64,
                    amplitude: 0.3,
                    noise_snr_db,
                },
                duration_s: 1.0,
                sample_rate_hz: 16_000,
                seed: 9_000 + i as u64,
            };
            generate_synthetic(&spec).unwrap().waveform
        })
        .collect()
}

fn bench_vad_analysis(c: &mut Criterion) {
    let batch = speech_like_batch(Some(20.0));
    let cfg = VadConfig::default();
    let mut group = c.benchmark_group("vad_analysis");
    group.bench_with_input(BenchmarkId::new("dispatched", BATCH), &batch, |b, batch| {
        b.iter(|| {
            let out = exec::map(batch.clone(), |w| {
                vad::analyze_utterance(&w, &cfg, "bench").unwrap().clean
            });
            black_box(out)
        })
    });
    group.bench_with_input(BenchmarkId::new("sequential", BATCH), &batch, |b, batch| {
        b.iter(|| {
            let out = exec::map_seq(batch.clone(), |w| {
                vad::analyze_utterance(&w, &cfg, "bench").unwrap().clean
            });
            black_box(out)
        })
    });
    group.finish();
}

fn bench_mixing(c: &mut Criterion) {
    let cleans = speech_like_batch(None);
    let noise = generate_synthetic(&SynthSpec {
        kind: SynthKind::WhiteNoise { rms: 0.05 },
        duration_s: 0.7,
        sample_rate_hz: 16_000,
        seed: 4,
    })
    .unwrap()
    .waveform;
    let target = SnrDb::new(20.0).unwrap();
    let mut group = c.benchmark_group("mix_at_snr");
    group.bench_with_input(BenchmarkId::new("dispatched", BATCH), &cleans, |b, cleans| {
        b.iter(|| {
            let out = exec::map(cleans.clone(), |clean| {
                signal::mix_at_snr(&clean, &noise, target).unwrap().1
            });
            black_box(out)
        })
    });
    group.bench_with_input(BenchmarkId::new("sequential", BATCH), &cleans, |b, cleans| {
        b.iter(|| {
            let out = exec::map_seq(cleans.clone(), |clean| {
                signal::mix_at_snr(&clean, &noise, target).unwrap().1
            });
            black_box(out)
        })
    });
    group.finish();
}

type OraclePair = (Waveform, Waveform, Waveform, Waveform, Waveform, Waveform, f64, f64);

fn oracle_batch() -> Vec<OraclePair> {
    let cleans = speech_like_batch(None);
    (0..BATCH)
        .map(|i| {
            let s_h = cleans[i].clone();
            let s_p = cleans[(i + 1) % BATCH].clone();
            let mk_noise = |seed: u64, rms: f64, len: usize| {
                let spec = SynthSpec {
                    kind: SynthKind::WhiteNoise { rms },
                    duration_s: len as f64 / 16_000.0,
                    sample_rate_hz: 16_000,
                    seed,
                };
                generate_synthetic(&spec).unwrap().waveform
            };
            let n_h = mk_noise(100 + i as u64, 0.02, s_h.len());
            let n_p = mk_noise(200 + i as u64, 0.01, s_p.len());
            let p_s_h = signal::power(&s_h).unwrap();
            let p_s_p = signal::power(&s_p).unwrap();
            let alpha_h = (p_s_h.value() / p_s_p.value()).sqrt();
            let alpha_p = 1.0 / alpha_h;
            let nhat_p = signal::power_preserving_tile(&n_p, s_h.len()).unwrap();
            let nhat_h = signal::power_preserving_tile(&n_h, s_p.len()).unwrap();
            (s_h, n_h, nhat_p, s_p, n_p, nhat_h, alpha_h, alpha_p)
        })
        .collect()
}

fn check_one(pair: &OraclePair) -> f64 {
    let (s_h, n_h, nhat_p, s_p, n_p, nhat_h, alpha_h, alpha_p) = pair;
    let report = check_pair_oracle(
        &OracleSide {
            id: "h",
            clean: s_h,
            own_noise: n_h,
            cross_estimate: nhat_p,
            alpha: *alpha_h,
        },
        &OracleSide {
            id: "p",
            clean: s_p,
            own_noise: n_p,
            cross_estimate: nhat_h,
            alpha: *alpha_p,
        },
    )
    .unwrap();
    report.residual_c3_waveform
}

fn bench_oracle_checks(c: &mut Criterion) {
    let pairs = oracle_batch();
    let mut group = c.benchmark_group("oracle_check");
    group.bench_with_input(BenchmarkId::new("dispatched", BATCH), &pairs, |b, pairs| {
        b.iter(|| black_box(exec::map(pairs.clone(), |p| check_one(&p))))
    });
    group.bench_with_input(BenchmarkId::new("sequential", BATCH), &pairs, |b, pairs| {
        b.iter(|| black_box(exec::map_seq(pairs.clone(), |p| check_one(&p))))
    });
    group.finish();
}

criterion_group!(benches, bench_vad_analysis, bench_mixing, bench_oracle_checks);
criterion_main!(benches);
