//! Noise-disparity suppression for two-group speech corpora.
//!
//! When healthy and pathological recordings carry systematically different
//! background noise (in type or SNR), a classifier can separate the groups
//! by their noise instead of their speech. This crate removes that shortcut
//! by cross-injecting noise between the groups: each utterance's noise is
//! estimated from its VAD-detected non-speech regions, and every utterance
//! receives the noise estimate of a randomly chosen utterance from the
//! other group, scaled by `alpha = sqrt(P_s_receiver / P_s_donor)` so the
//! injected noise lands at the same SNR on both sides. After augmentation,
//! both groups contain both noises at matched SNRs.
//!
//! The crate is organized as a pipeline:
//!
//! - [`signal`]: waveforms, power, SNR, mixing at a target SNR.
//! - [`vad`]: energy-based speech detection, noise-estimate extraction,
//!   and clean-power estimation by power subtraction.
//! - [`augment`]: the SNR-equalizing scale factor, noise injection, and
//!   deterministic per-epoch donor pairing.
//! - [`verify`]: residuals of the three SNR-matching conditions, in oracle
//!   and practical modes, plus the no-augmentation disparity baseline.
//! - [`corpus`]: manifests, synthetic test signals with exact ground
//!   truth, and batch noisy-corpus construction.
//! - [`wav`], [`fsio`]: minimal RIFF I/O and crash-safe writes.
//! - [`seed`], [`exec`]: deterministic RNG stream derivation and the
//!   parallel/sequential batch strategy (feature `parallel`, on by
//!   default).
//!
//! All audio arithmetic is 64-bit floating point end to end, and every
//! random choice descends deterministically from a single run seed.

pub mod augment;
pub mod corpus;
pub mod error;
pub mod exec;
pub mod fsio;
pub mod seed;
pub mod signal;
pub mod vad;
pub mod verify;
pub mod wav;

pub use augment::{
    augment_utterance, cross_noise_scale, make_pairing, Assignment, AugmentationOutcome, Group,
    PairingPlan, Utterance,
};
pub use corpus::{
    build_noisy_corpus, generate_synthetic, ground_truth_mask, load_manifest, save_manifest,
    ManifestEntry, MixOptions, MixedFile, SnrSetting, Split, SynthKind, SynthOutput, SynthSpec,
};
pub use error::{Error, Result};
pub use fsio::atomic_write_bytes;
pub use signal::{
    add_scaled, mix_at_snr, power, power_preserving_tile, snr_db, snr_scale, tile_to_length,
    Power, SnrDb, Waveform,
};
pub use vad::{
    analyze_utterance, detect_speech, estimate_clean_power, extract_noise, frame_energies,
    CleanPowerEstimate, FrameLabel, NoiseEstimate, UtteranceAnalysis, VadConfig, VadMask,
};
pub use verify::{
    check_pair_oracle, check_pair_practical, measure_disparity, summarize, ConditionReport,
    DisparityReport, GroupSnrStats, OracleSide, PairIds, ResidualStats, VerifyMode,
    VerifySummary,
};
pub use wav::{read_wav, write_wav, BitDepth, WriteStats};
