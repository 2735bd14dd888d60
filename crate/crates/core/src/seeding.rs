//! Deterministic per-stream seeding.
//!
//! Every chain owns its own generator, seeded from `(master_seed, index)`
//! through the SplitMix64 finalizer:
//!
//! ```text
//! stream_seed(master, i) = mix64(master + 0x9E3779B97F4A7C15 * (i + 1))
//! ```
//!
//! with wrapping arithmetic. The 64-bit result seeds a ChaCha8 generator via
//! `SeedableRng::seed_from_u64`. Streams therefore do not depend on thread
//! scheduling, and any implementation with the same mix and generator
//! reproduces the outputs bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator type used by every chain.
pub type StreamRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream_seed(master: u64, index: u64) -> u64 {
    mix64(master.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

pub fn stream_rng(master: u64, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(stream_seed(master, index))
}
