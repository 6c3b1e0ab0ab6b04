//! Deterministic derivation of per-job RNG seeds.
//!
//! Sweeps fan out over (width, depth, run) cells that must each see an
//! independent, reproducible random stream regardless of execution order.
//! `derive_seed` folds a root seed and a tag path through a splitmix64-style
//! mixer; equal inputs give equal seeds on every platform.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// The crate's reproducible generator, seeded from a 64-bit value.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mix a root seed with a path of tags into a new 64-bit seed.
pub fn derive_seed(root: u64, tags: &[u64]) -> u64 {
    let mut state = split_mix(root.wrapping_add(0x9e3779b97f4a7c15));
    for &tag in tags {
        // Avalanche the tag before folding so nearby paths decorrelate.
        let folded = split_mix(tag.wrapping_add(0xd1b54a32d192ed03));
        state = split_mix(state ^ folded);
    }
    state
}

fn split_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
