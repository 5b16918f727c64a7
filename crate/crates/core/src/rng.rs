//! Reproducible random streams.
//!
//! Every stochastic routine takes its generator from [`stream`], which turns
//! a master seed plus a path of stream indices into an independent ChaCha8
//! generator. Seeds are mixed with SplitMix64, so `stream(s, &[a, b])` is a
//! pure function of its arguments and never depends on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for `index` under `seed`: `mix64(seed ^ mix64(index))`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index))
}

/// Derives a seed along a path of indices.
pub fn derive_path(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(seed, |s, &i| derive_seed(s, i))
}

/// Generator seeded from `seed` and a path of stream indices.
pub fn stream(seed: u64, path: &[u64]) -> Rng {
    Rng::seed_from_u64(derive_path(seed, path))
}

/// Stream labels used inside the crate.
pub(crate) mod label {
    /// Seeding runs use `[SEEDING, run_index]`.
    pub const SEEDING: u64 = 1;
    /// Breathe-in offsets use `[BREATHING]`.
    pub const BREATHING: u64 = 2;
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = stream(7, &[1, 2]).random();
        let b: u64 = stream(7, &[1, 2]).random();
        let c: u64 = stream(7, &[1, 3]).random();
        let d: u64 = stream(8, &[1, 2]).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn mix64_known_value() {
        // first output of the reference SplitMix64 generator seeded with 0
        assert_eq!(mix64(0), 0xE220_A839_7B1D_CDAF);
    }
}
