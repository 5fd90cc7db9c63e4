//! Replayable randomness.
//!
//! Every random quantity in a run is a pure function of a 64-bit base seed and
//! a small set of integer labels (trial, agent, round, stream). Sub-seeds are
//! derived with [`derive_seed`]; sequential streams are SplitMix64 generators
//! started at a derived state.

use alloc::vec::Vec;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

const LABEL_MUL: u64 = 0xD6E8_FEB8_6659_FD93;

/// Mixes a label into a base seed. Distinct `(base, label)` pairs give
/// statistically independent outputs.
#[inline]
pub fn derive_seed(base: u64, label: u64) -> u64 {
    let head = SplitMix64::seed_from_u64(base).next_u64();
    SplitMix64::seed_from_u64(head ^ label.wrapping_mul(LABEL_MUL)).next_u64()
}

/// Maps 64 random bits to a uniform draw in `(0, 1]`.
#[inline]
pub fn unit_open_low(bits: u64) -> f64 {
    ((bits >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Counter-based uniform in `(0, 1]` addressed by two indices, so a table
/// cell can be read without generating its neighbours.
#[inline]
pub fn unit_at(seed: u64, row: u64, col: u64) -> f64 {
    unit_open_low(derive_seed(derive_seed(seed, row), col))
}

/// Sequential uniform stream.
#[derive(Debug, Clone)]
pub struct UniformStream(SplitMix64);

impl UniformStream {
    pub fn new(seed: u64) -> Self {
        UniformStream(SplitMix64::seed_from_u64(seed))
    }

    /// Uniform in `(0, 1]`.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        unit_open_low(self.0.next_u64())
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
}

/// Source of the two streams a self-resampling procedure consumes: coin flips
/// (`β₁, β₂, …`) and uniforms (`γ₁, γ₂, …`).
pub trait ResampleSource {
    /// Next coin, `true` with probability `p_success`.
    fn coin(&mut self, p_success: f64) -> bool;
    /// Next uniform in `(0, 1]`.
    fn uniform(&mut self) -> f64;
}

/// Seed of one agent's resampling in one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResampleSeed {
    pub base: u64,
}

const COIN_STREAM: u64 = 0;
const UNIFORM_STREAM: u64 = 1;

impl ResampleSeed {
    pub const fn new(base: u64) -> Self {
        ResampleSeed { base }
    }

    /// Seed of `agent` inside a run whose resampling seed is `run_seed`.
    pub fn for_agent(run_seed: u64, agent: usize) -> Self {
        ResampleSeed::new(derive_seed(run_seed, agent as u64))
    }

    /// Fresh streams positioned at their first element.
    pub fn streams(&self) -> SeededStreams {
        SeededStreams {
            coins: UniformStream::new(derive_seed(self.base, COIN_STREAM)),
            uniforms: UniformStream::new(derive_seed(self.base, UNIFORM_STREAM)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeededStreams {
    coins: UniformStream,
    uniforms: UniformStream,
}

impl ResampleSource for SeededStreams {
    #[inline]
    fn coin(&mut self, p_success: f64) -> bool {
        // unit is in (0, 1]; p = 1 always succeeds, p = 0 never does.
        self.coins.next_unit() <= p_success
    }

    #[inline]
    fn uniform(&mut self) -> f64 {
        self.uniforms.next_unit()
    }
}

/// Fixed coin and uniform sequences, for pinning exact paths in tests.
///
/// Panics when a sequence runs out.
#[derive(Debug, Clone, Default)]
pub struct ScriptedStreams {
    coins: Vec<bool>,
    uniforms: Vec<f64>,
    next_coin: usize,
    next_uniform: usize,
}

impl ScriptedStreams {
    pub fn new(coins: &[bool], uniforms: &[f64]) -> Self {
        ScriptedStreams {
            coins: coins.to_vec(),
            uniforms: uniforms.to_vec(),
            next_coin: 0,
            next_uniform: 0,
        }
    }

    pub fn coins_used(&self) -> usize {
        self.next_coin
    }

    pub fn uniforms_used(&self) -> usize {
        self.next_uniform
    }
}

impl ResampleSource for ScriptedStreams {
    fn coin(&mut self, _p_success: f64) -> bool {
        let c = *self
            .coins
            .get(self.next_coin)
            .expect("scripted coin stream exhausted");
        self.next_coin += 1;
        c
    }

    fn uniform(&mut self) -> f64 {
        let u = *self
            .uniforms
            .get(self.next_uniform)
            .expect("scripted uniform stream exhausted");
        self.next_uniform += 1;
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_is_identical() {
        let seed = ResampleSeed::new(42);
        let mut a = seed.streams();
        let mut b = seed.streams();
        for _ in 0..100 {
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
            assert_eq!(a.coin(0.3), b.coin(0.3));
        }
    }

    #[test]
    fn agents_get_distinct_streams() {
        let a = ResampleSeed::for_agent(7, 0);
        let b = ResampleSeed::for_agent(7, 1);
        assert_ne!(a, b);
        assert_ne!(a.streams().uniform(), b.streams().uniform());
    }

    #[test]
    fn units_are_in_half_open_range() {
        assert_eq!(unit_open_low(u64::MAX), 1.0);
        assert!(unit_open_low(0) > 0.0);
        let mut s = UniformStream::new(1);
        let mean = (0..100_000).map(|_| s.next_unit()).sum::<f64>() / 100_000.0;
        assert!((mean - 0.5).abs() < 0.005);
    }

    #[test]
    fn unit_at_is_addressable() {
        assert_eq!(unit_at(5, 3, 9), unit_at(5, 3, 9));
        assert_ne!(unit_at(5, 3, 9), unit_at(5, 9, 3));
    }
}
