use crate::error::{Error, Result};
use crate::seed::unit_at;
use alloc::vec::Vec;

/// Where rewards come from. `round` and `play` are 1-based; `play` counts the
/// agent's impressions including the current one.
pub trait RewardSource {
    fn num_agents(&self) -> usize;
    fn reward(&self, agent: usize, round: u64, play: u64) -> f64;
}

fn table(n: usize, t: usize, values: Vec<f64>) -> Result<Vec<f64>> {
    if values.len() != n * t {
        return Err(Error::Config("reward table has the wrong dimensions"));
    }
    if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::Config("rewards must lie in [0, 1]"));
    }
    Ok(values)
}

/// Rewards indexed by (agent, round): the reward agent `i` would get if played
/// in round `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClickRealization {
    agents: usize,
    rounds: usize,
    /// Agent-major: `values[i * rounds + (t - 1)]`.
    values: Vec<f64>,
}

impl ClickRealization {
    pub fn new(agents: usize, rounds: usize, values: Vec<f64>) -> Result<Self> {
        Ok(ClickRealization {
            agents,
            rounds,
            values: table(agents, rounds, values)?,
        })
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Agent-major cell values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, agent: usize, round: u64) -> f64 {
        self.values[agent * self.rounds + (round as usize - 1)]
    }

    pub fn row(&self, agent: usize) -> &[f64] {
        &self.values[agent * self.rounds..(agent + 1) * self.rounds]
    }
}

impl RewardSource for ClickRealization {
    fn num_agents(&self) -> usize {
        self.agents
    }
    fn reward(&self, agent: usize, round: u64, _play: u64) -> f64 {
        self.get(agent, round)
    }
}

/// Rewards indexed by (agent, play count): the reward agent `i` gets the
/// `s`-th time it is played.
#[derive(Debug, Clone, PartialEq)]
pub struct StackRealization {
    agents: usize,
    depth: usize,
    values: Vec<f64>,
}

impl StackRealization {
    pub fn new(agents: usize, depth: usize, values: Vec<f64>) -> Result<Self> {
        Ok(StackRealization {
            agents,
            depth,
            values: table(agents, depth, values)?,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, agent: usize, play: u64) -> f64 {
        self.values[agent * self.depth + (play as usize - 1)]
    }
}

impl RewardSource for StackRealization {
    fn num_agents(&self) -> usize {
        self.agents
    }
    fn reward(&self, agent: usize, _round: u64, play: u64) -> f64 {
        self.get(agent, play)
    }
}

/// Bernoulli click table generated on demand from a seed: cell `(i, t)` is 1
/// when the counter-based uniform at `(i, t)` is at most `ctr_i`. Identical to
/// the table [`stochastic_clicks`] materializes for the same seed.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliClicks {
    pub ctrs: Vec<f64>,
    pub seed: u64,
}

#[inline]
fn bernoulli_cell(seed: u64, ctr: f64, agent: usize, round: u64) -> f64 {
    if unit_at(seed, agent as u64, round) <= ctr {
        1.0
    } else {
        0.0
    }
}

impl RewardSource for BernoulliClicks {
    fn num_agents(&self) -> usize {
        self.ctrs.len()
    }
    fn reward(&self, agent: usize, round: u64, _play: u64) -> f64 {
        bernoulli_cell(self.seed, self.ctrs[agent], agent, round)
    }
}

/// Same construction indexed by play count.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliStack {
    pub ctrs: Vec<f64>,
    pub seed: u64,
}

impl RewardSource for BernoulliStack {
    fn num_agents(&self) -> usize {
        self.ctrs.len()
    }
    fn reward(&self, agent: usize, _round: u64, play: u64) -> f64 {
        bernoulli_cell(self.seed, self.ctrs[agent], agent, play)
    }
}

fn check_ctrs(ctrs: &[f64]) -> Result<()> {
    if ctrs.iter().all(|c| (0.0..=1.0).contains(c)) {
        Ok(())
    } else {
        Err(Error::Config("click-through rates must lie in [0, 1]"))
    }
}

/// i.i.d. Bernoulli(`ctr_i`) click table with `rounds` columns.
pub fn stochastic_clicks(ctrs: &[f64], rounds: usize, seed: u64) -> Result<ClickRealization> {
    check_ctrs(ctrs)?;
    let mut values = Vec::with_capacity(ctrs.len() * rounds);
    for (i, &c) in ctrs.iter().enumerate() {
        values.extend((1..=rounds as u64).map(|t| bernoulli_cell(seed, c, i, t)));
    }
    ClickRealization::new(ctrs.len(), rounds, values)
}

/// i.i.d. Bernoulli stack realization with `depth` plays per agent.
pub fn stochastic_stack(ctrs: &[f64], depth: usize, seed: u64) -> Result<StackRealization> {
    let clicks = stochastic_clicks(ctrs, depth, seed)?;
    StackRealization::new(ctrs.len(), depth, clicks.values)
}
