//! Seed derivation.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] whose seed is
//! mixed from a global seed and a path of integer coordinates (episode index,
//! restart index, ...). Work items can therefore run in any order or on any
//! number of threads and still see the same random stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix `seed` with each coordinate in `path`, in order.
pub fn derive(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(seed), |acc, &p| mix64(acc ^ mix64(p)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rng_at(seed: u64, path: &[u64]) -> ChaCha8Rng {
    rng(derive(seed, path))
}

// Stream tags keep unrelated uses of the same seed apart.
pub(crate) const STREAM_EPISODE: u64 = 0x45_50_49;
pub(crate) const STREAM_KMEANS: u64 = 0x4B_4D_4E;
pub(crate) const STREAM_LOUVAIN: u64 = 0x4C_56_4E;
pub(crate) const STREAM_SYNTH: u64 = 0x53_59_4E;
pub(crate) const STREAM_AUX: u64 = 0x41_55_58;
