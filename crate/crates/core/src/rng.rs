//! Reproducible random streams.
//!
//! Every stream is ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`), keyed by
//! expanding a 64-bit seed with `SeedableRng::seed_from_u64`. The output for
//! a given seed does not depend on the platform.
//!
//! Parallel work never shares a stream. Worker or block `i` uses
//! `child(i)`, whose seed is `splitmix64(seed ^ splitmix64(i + 1))`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Name of the generator behind [`SeededRng`].
pub const ALGORITHM: &str = "chacha8";

/// Seed used when neither a flag nor an environment variable provides one.
pub const DEFAULT_SEED: u64 = 20_160_519;

#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn algorithm(&self) -> &'static str {
        ALGORITHM
    }

    /// Independent stream for sub-task `index`, derived from the seed only
    /// (not from how much of this stream has been consumed).
    pub fn child(&self, index: u64) -> Self {
        Self::new(mix_seed(self.seed, index))
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child-seed derivation for `(seed, index)`.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(1)))
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
