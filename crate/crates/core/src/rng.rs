//! Counter-based seed derivation.
//!
//! Every random stream in the crate is a ChaCha8 generator keyed by a master
//! seed and a path of integer indices (replicate, outer sample, inner sample,
//! ...). Streams never share state, so replicates can run in any order or on
//! any number of threads and still produce identical output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and a path of indices.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(mix64(master), |acc, &k| mix64(acc ^ mix64(k.wrapping_add(0x632b_e59b_d9b4_e019))))
}

/// Independent generator for `(master, path...)`.
pub fn stream(master: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, path))
}

/// A uniform in `[0, 1)` that is a pure function of seed and key.
///
/// Used for per-site lattice occupancies so that a site's uniform does not
/// depend on which window it is evaluated in.
#[inline]
pub fn keyed_uniform(seed: u64, key: &[i64]) -> f64 {
    let h = key
        .iter()
        .fold(mix64(seed ^ 0x5851_f42d_4c95_7f2d), |acc, &k| mix64(acc ^ (k as u64)));
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
