//! Seed derivation.
//!
//! Every random stream in a simulation is a `ChaCha8Rng` seeded from a
//! 64-bit value derived by [`derive_seed`]. The derivation is a SplitMix64
//! finalizer chained over `(parent, tag, index)` and is frozen: changing it
//! changes every published output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags. Values are part of the frozen seed layout.
pub mod tag {
    pub const TRIAL: u64 = 0x7472_6961_6c00_0001;
    pub const LAYOUT: u64 = 0x6c61_796f_7574_0002;
    pub const MOBILITY: u64 = 0x6d6f_6269_6c00_0003;
    pub const FADING: u64 = 0x6661_6469_6e67_0004;
    pub const KMEANS: u64 = 0x6b6d_6561_6e73_0005;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for stream `tag` / position `index` under `parent`.
pub fn derive_seed(parent: u64, tag: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(parent) ^ tag) ^ index)
}

/// Seed of trial `index` under a master seed. Depends only on the pair, so
/// adding realizations never disturbs earlier trials.
pub fn trial_seed(master_seed: u64, index: u64) -> u64 {
    derive_seed(master_seed, tag::TRIAL, index)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
