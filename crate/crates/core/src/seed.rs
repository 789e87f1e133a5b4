//! Deterministic derivation of per-task RNG streams from a single run seed.
//!
//! All randomness descends from one `u64`. Independent streams are derived
//! by hashing a label (epoch index, utterance id) together with the seed, so
//! output for a given `(seed, label)` pair is stable across runs, platforms,
//! and thread schedules. The mixers are pinned implementations rather than
//! `std::hash` so the byte-level mapping can never drift with a toolchain
//! upgrade.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer: decorrelates structured inputs (seed 0, 1, 2, ...)
/// into well-mixed stream keys.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// FNV-1a over raw bytes, used to fold string labels into stream keys.
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// RNG for run-level planning decisions in a given epoch (donor pairing).
pub fn plan_stream(seed: u64, epoch: u64) -> ChaCha8Rng {
    let key = splitmix64(splitmix64(seed) ^ splitmix64(epoch ^ 0xa5a5_a5a5_a5a5_a5a5));
    ChaCha8Rng::seed_from_u64(key)
}

/// RNG for per-utterance sample generation and placement, keyed by the
/// utterance id so adding or removing other files never shifts it.
pub fn file_stream(seed: u64, utterance_id: &str) -> ChaCha8Rng {
    let key = splitmix64(splitmix64(seed) ^ fnv1a64(utterance_id.as_bytes()));
    ChaCha8Rng::seed_from_u64(key)
}
