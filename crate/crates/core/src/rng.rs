//! Reproducible random streams.
//!
//! Every stream is a ChaCha8 keystream keyed by a 64-bit seed, so the values
//! depend only on the seed and the position in the stream. Replication seeds
//! are derived by hashing `(master_seed, index)`, which makes replications
//! independent of the order in which they are run.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use statrs::function::erf::erfc_inv;

/// Uniform and normal variates from a counter-based keystream.
#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on the open interval `(0, 1)`, 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal by inversion of one uniform.
    pub fn standard_normal(&mut self) -> f64 {
        inverse_normal_cdf(self.uniform())
    }

    /// `Bin(trials, p)` as a sum of Bernoulli draws.
    pub fn binomial(&mut self, trials: u32, p: f64) -> u32 {
        (0..trials).filter(|_| self.uniform() < p).count() as u32
    }
}

/// `Φ⁻¹(p)` for `p ∈ (0, 1)`.
pub fn inverse_normal_cdf(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for replication `index` of a study keyed by `master_seed`.
pub fn replication_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}
