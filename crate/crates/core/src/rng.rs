//! Seeded random sources.
//!
//! Every stochastic routine takes an explicit `&mut R: Rng`. Simulations derive
//! independent streams from a single experiment seed with [`stream`], so that
//! adding a draw in one stage never shifts the draws of another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Seeded generator for a base seed.
pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for a named sub-stream of `seed`.
pub fn stream(seed: u64, tag: u64) -> SimRng {
    seeded(mix(seed, tag))
}

// splitmix64 finalizer over the pair.
fn mix(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
