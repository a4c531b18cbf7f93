//! Seeded random streams.
//!
//! Every stochastic routine takes an explicit generator. Parallel work derives
//! one stream per task index from a master seed so results do not depend on
//! scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type StreamRng = ChaCha20Rng;

/// Mixes a master seed with a task index (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(seed: u64) -> StreamRng {
    StreamRng::seed_from_u64(seed)
}

pub fn indexed_stream(seed: u64, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(seed, index))
}
