//! Allocation rules induced by bandit algorithms.
//!
//! The algorithm only ever sees modified rewards `(b_i / b_max) · π(t)` for the
//! agent it picks, so a deterministic algorithm whose choice depends only on
//! round statistics becomes a monotone allocation rule.

use super::realization::RewardSource;
use super::BanditRun;
use crate::error::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
use libm::{log, sqrt};

/// Round statistics: cumulative (modified) payoff and impressions per agent
/// over the rounds played so far.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RoundStats {
    pub payoff: Vec<f64>,
    pub impressions: Vec<u64>,
}

impl RoundStats {
    pub fn new(agents: usize) -> Self {
        RoundStats {
            payoff: vec![0.0; agents],
            impressions: vec![0; agents],
        }
    }

    pub fn agents(&self) -> usize {
        self.payoff.len()
    }
}

/// Deterministic bandit algorithm whose choice is a function of the round
/// statistics alone.
pub trait StatsPolicy {
    fn choose(&self, stats: &RoundStats, horizon: u64) -> usize;
}

/// UCB1 with `log T` in the confidence radius and ties broken towards the
/// lowest index. Agents with no impressions are played first, lowest index
/// first.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Ucb1;

/// UCB1 index `π_i/ν_i + sqrt(8 ln T / ν_i)`.
pub fn ucb1_index(payoff: f64, impressions: u64, horizon: u64) -> f64 {
    let n = impressions as f64;
    payoff / n + sqrt(8.0 * log(horizon as f64) / n)
}

/// Agent UCB1 plays given fully initialized statistics (every `ν_i >= 1`).
pub fn ucb1_choose(stats: &RoundStats, horizon: u64) -> usize {
    let mut best = 0;
    let mut best_index = f64::NEG_INFINITY;
    for i in 0..stats.agents() {
        let idx = ucb1_index(stats.payoff[i], stats.impressions[i], horizon);
        if idx > best_index {
            best = i;
            best_index = idx;
        }
    }
    best
}

impl StatsPolicy for Ucb1 {
    fn choose(&self, stats: &RoundStats, horizon: u64) -> usize {
        if let Some(i) = stats.impressions.iter().position(|&v| v == 0) {
            return i;
        }
        ucb1_choose(stats, horizon)
    }
}

/// Checks bids against `[0, b_max]`.
pub fn check_bids(bids: &[f64], b_max: f64) -> Result<()> {
    if !(b_max > 0.0 && b_max.is_finite()) {
        return Err(Error::Config("b_max must be positive and finite"));
    }
    for &b in bids {
        if !(0.0..=b_max).contains(&b) {
            return Err(Error::Config("bids must lie in [0, b_max]"));
        }
    }
    Ok(())
}

/// Runs the rule `policy` induces for `horizon` rounds.
pub fn run_induced<P, S>(
    policy: &P,
    bids: &[f64],
    b_max: f64,
    horizon: u64,
    rewards: &S,
) -> Result<BanditRun>
where
    P: StatsPolicy + ?Sized,
    S: RewardSource + ?Sized,
{
    check_bids(bids, b_max)?;
    let n = bids.len();
    if n == 0 || rewards.num_agents() != n {
        return Err(Error::BidCount {
            expected: rewards.num_agents(),
            got: n,
        });
    }
    let scale: Vec<f64> = bids.iter().map(|&b| b / b_max).collect();
    let mut stats = RoundStats::new(n);
    let mut run = BanditRun::new(n, horizon as usize);
    for t in 1..=horizon {
        let i = policy.choose(&stats, horizon);
        let reward = rewards.reward(i, t, stats.impressions[i] + 1);
        stats.impressions[i] += 1;
        stats.payoff[i] += scale[i] * reward;
        run.record(i, reward);
    }
    Ok(run)
}
