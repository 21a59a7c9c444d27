//! Deterministic, splittable randomness for sampling and property campaigns.
//!
//! Every random draw in the crate flows through a [`ChaCha8Rng`] seeded from
//! a user-supplied `u64`; independent streams (per campaign case, per
//! sampling request) are split off by stream id, so campaigns are
//! reproducible case by case.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator for stream `stream` of seed `seed`.
pub fn split(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Root generator for a seed.
pub fn root(seed: u64) -> ChaCha8Rng {
    split(seed, 0)
}

/// Derived seed for APIs that take a plain seed (sampling requests inside
/// campaign cases). Splitmix-style finalizer.
pub fn derive(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
