//! Multi-armed bandit allocation rules.
//!
//! Agents are ads with private per-click values; in each of `T` rounds one
//! agent is shown and the realized click reward in `[0, 1]` goes to it. An
//! agent's allocation is its total click reward over the run.

mod induced;
mod newcb;
mod realization;
mod regret;
mod rule;

pub use induced::{
    check_bids, run_induced, ucb1_choose, ucb1_index, RoundStats, StatsPolicy, Ucb1,
};
pub use newcb::{newcb_run, NewCb, NewCbRun, NewCbState, RoundOutcome, RoundRecord};
pub use realization::{
    stochastic_clicks, stochastic_stack, BernoulliClicks, BernoulliStack, ClickRealization,
    RewardSource, StackRealization,
};
pub use regret::{regret, RegretReport};
pub use rule::{BanditAlgorithm, BanditRule, ClickModel, RewardModel, StackModel};

use crate::error::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// Per-round record of a bandit run. Agent ids are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditRun {
    pub choices: Vec<usize>,
    pub rewards: Vec<f64>,
    /// Total plays per agent.
    pub impressions: Vec<u64>,
    /// Total click reward per agent.
    pub clicks: Vec<f64>,
}

impl BanditRun {
    pub fn new(agents: usize, horizon: usize) -> Self {
        BanditRun {
            choices: Vec::with_capacity(horizon),
            rewards: Vec::with_capacity(horizon),
            impressions: vec![0; agents],
            clicks: vec![0.0; agents],
        }
    }

    pub fn record(&mut self, agent: usize, reward: f64) {
        self.choices.push(agent);
        self.rewards.push(reward);
        self.impressions[agent] += 1;
        self.clicks[agent] += reward;
    }
}

/// `b / max_i b_i`.
pub fn normalize_bids(bids: &[f64]) -> Result<Vec<f64>> {
    let max = bids.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 || max.is_nan() {
        return Err(Error::ZeroBids);
    }
    Ok(bids.iter().map(|&b| b / max).collect())
}
