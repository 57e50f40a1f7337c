//! Seed derivation. Every sampler takes an injected generator; sub-streams
//! are derived deterministically from a parent seed and a tag.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mix a parent seed with a sequence of tags into a child seed.
pub fn derive_seed(parent: u64, tags: &[i64]) -> u64 {
    let mut h = splitmix(parent);
    for &t in tags {
        h = splitmix(h ^ (t as u64).wrapping_mul(0x2545_f491_4f6c_dd1d));
    }
    h
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Child generator for a named sub-task.
pub fn child_rng(parent: u64, tags: &[i64]) -> Rng {
    rng_from_seed(derive_seed(parent, tags))
}
