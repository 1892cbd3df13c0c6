//! Counter-based seed derivation.
//!
//! Every replication of every experiment gets its own generator, seeded from
//! `(master seed, experiment path...)` through a SplitMix64 mixing chain. The
//! mapping depends only on those integers, so results do not depend on the
//! order in which replications run or on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for all sampling in this crate.
pub type StreamRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a path of counters into the master seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(master.wrapping_add(GOLDEN_GAMMA)), |acc, &c| {
        mix64(acc ^ mix64(c.wrapping_add(GOLDEN_GAMMA)).wrapping_add(GOLDEN_GAMMA))
    })
}

/// Generator for the stream addressed by `path` under `master`.
pub fn stream(master: u64, path: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(master, path))
}

/// Generator seeded directly from a user seed.
pub fn from_seed(seed: u64) -> StreamRng {
    stream(seed, &[])
}
