//! Seeded random streams.
//!
//! Every stochastic routine takes a 64-bit seed and derives an independent
//! ChaCha stream per unit of work (trial index, repeat index, permutation
//! index). Work can then be split across threads without changing results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream `stream` of the generator family identified by `seed`.
pub fn derive(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes a sub-key into a seed so nested families do not collide.
pub fn subseed(seed: u64, key: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ key.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
