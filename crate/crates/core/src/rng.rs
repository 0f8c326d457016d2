//! Seedable PRNG shared by every stochastic stage.
//!
//! The generator is xoshiro256** seeded through SplitMix64, so a sequence can
//! be reproduced in any language from the seed alone. Floats use the top 53
//! bits; bounded integers use rejection sampling over the largest multiple of
//! the bound.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

#[derive(Debug, Clone)]
pub struct Rng(Xoshiro256StarStar);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(Xoshiro256StarStar::seed_from_u64(seed))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let x = self.next_u64();
            if x < zone {
                return (x % n) as usize;
            }
        }
    }

    /// Fisher-Yates, walking from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for a named stage: the stage name is FNV-1a hashed into the master seed.
pub fn derive_seed(master: u64, stage: &str) -> u64 {
    splitmix64(master ^ crate::fingerprint::fnv1a64(stage.as_bytes()))
}

/// Seed for the `index`-th member of a family (folds, sweep points).
pub fn derive_indexed_seed(master: u64, stage: &str, index: u64) -> u64 {
    splitmix64(derive_seed(master, stage) ^ splitmix64(index))
}
