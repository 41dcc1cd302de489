//! Deterministic random substreams.
//!
//! Every random draw in a run comes from a [`RngHandle`] derived from the run
//! seed and a textual label. The derivation hashes `(seed, label)` with
//! SHA-256 and seeds a ChaCha8 generator with the digest, so a substream is a
//! pure function of its inputs and identical on every platform.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

const DOMAIN: &[u8] = b"strata/substream/v1";

/// A reproducible random stream that can spawn labelled children.
#[derive(Clone, Debug)]
pub struct RngHandle {
    key: [u8; 32],
    rng: ChaCha8Rng,
}

/// Derive the substream for `unit_label` under `run_seed`.
pub fn rng_substream(run_seed: u64, unit_label: &str) -> RngHandle {
    let mut hasher = Sha256::new();
    hasher.update(DOMAIN);
    hasher.update(run_seed.to_le_bytes());
    hasher.update((unit_label.len() as u64).to_le_bytes());
    hasher.update(unit_label.as_bytes());
    RngHandle::from_key(hasher.finalize().into())
}

impl RngHandle {
    fn from_key(key: [u8; 32]) -> Self {
        Self {
            key,
            rng: ChaCha8Rng::from_seed(key),
        }
    }

    /// Child stream identified by `label`. Depends only on the parent's
    /// identity, never on how many values the parent has produced.
    pub fn derive(&self, label: &str) -> RngHandle {
        let mut hasher = Sha256::new();
        hasher.update(DOMAIN);
        hasher.update(self.key);
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
        RngHandle::from_key(hasher.finalize().into())
    }

    /// Uniform draw on `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw on `[lo, hi)`.
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal draw.
    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Uniform index in `0..n`. `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index range must be non-empty");
        // Lemire-style widening multiply; bias is below 2^-64 per draw.
        ((self.rng.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Bernoulli trial with success probability `p`.
    pub fn chance(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Fresh 64-bit seed, used to hand a child run its own seed.
    pub fn next_seed(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

impl RngCore for RngHandle {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
