//! Stable seed derivation.
//!
//! Every random stream in the crate is a [`ChaCha8Rng`] seeded from a 64-bit
//! value obtained by mixing a parent seed with one or more indices. The mix is
//! the splitmix64 finalizer, so derived seeds do not depend on thread
//! scheduling or on the order in which streams are created.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a parent seed with an index into a child seed.
pub fn mix(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index.wrapping_mul(GOLDEN_GAMMA).rotate_left(17))
}

/// Mixes a parent seed with a sequence of indices.
pub fn mix_all(seed: u64, indices: &[u64]) -> u64 {
    indices.iter().fold(seed, |acc, &i| mix(acc, i))
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
