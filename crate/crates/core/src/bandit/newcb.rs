//! NewCB: an ex-post monotone bandit allocation rule.
//!
//! Round `t` belongs to the designated agent `1 + (t mod n)` (1-based). An
//! active designated agent is played and only these designated plays update its
//! click statistics and confidence interval on `b_i · μ_i`. Otherwise a
//! uniformly random active agent is played. After every round an agent whose
//! upper bound falls below some active agent's lower bound is deactivated for
//! good.
//!
//! Confidence bounds are stored divided by the agent's normalized bid. The
//! stored values then evolve identically under any two bids for as long as the
//! agent stays active, and the actual bounds `L_i = b_i · l_i`, `U_i = b_i · u_i`
//! are only formed for comparisons. Floating-point products are monotone in
//! `b_i`, so ex-post monotonicity survives rounding.
//!
//! The random choice among active agents uses a priority per (round, agent)
//! drawn from a counter-based stream of the mechanism seed, and picks the
//! active agent with the smallest priority. The choice is uniform over the
//! active set, and shrinking the set of competitors can only help an agent.

use super::realization::RewardSource;
use super::{check_bids, BanditRun};
use crate::error::{Error, Result};
use crate::seed::unit_at;
use alloc::vec;
use alloc::vec::Vec;
use libm::{log, sqrt};

#[derive(Debug, Clone, PartialEq)]
pub struct NewCbState {
    pub active: Vec<bool>,
    /// Clicks over designated rounds.
    pub clicks: Vec<f64>,
    /// Impressions over designated rounds.
    pub impressions: Vec<u64>,
    scale: Vec<f64>,
    unit_lower: Vec<f64>,
    unit_upper: Vec<f64>,
}

impl NewCbState {
    fn new(scale: Vec<f64>) -> Self {
        let n = scale.len();
        NewCbState {
            active: vec![true; n],
            clicks: vec![0.0; n],
            impressions: vec![0; n],
            scale,
            unit_lower: vec![0.0; n],
            unit_upper: vec![1.0; n],
        }
    }

    pub fn agents(&self) -> usize {
        self.scale.len()
    }

    /// Normalized bid `b_i / b_max`.
    pub fn scale(&self, agent: usize) -> f64 {
        self.scale[agent]
    }

    /// Lower confidence bound `L_i` on the normalized `b_i · μ_i`.
    pub fn lower(&self, agent: usize) -> f64 {
        self.scale[agent] * self.unit_lower[agent]
    }

    pub fn upper(&self, agent: usize) -> f64 {
        self.scale[agent] * self.unit_upper[agent]
    }

    /// `(L_i / b_i, U_i / b_i)` with `b_i` normalized.
    pub fn unit_bounds(&self, agent: usize) -> (f64, f64) {
        (self.unit_lower[agent], self.unit_upper[agent])
    }

    /// `max_{j active} L_j`.
    pub fn best_lower(&self) -> f64 {
        (0..self.agents())
            .filter(|&j| self.active[j])
            .map(|j| self.lower(j))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn active_agents(&self) -> impl Iterator<Item = usize> + '_ {
        self.active
            .iter()
            .enumerate()
            .filter_map(|(i, &a)| a.then_some(i))
    }
}

/// One row of the per-round trace. Agent ids are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: u64,
    pub designated: usize,
    pub played: usize,
    pub reward: f64,
    /// Active set after the round's deactivations.
    pub active: Vec<usize>,
}

/// Stepwise NewCB runner.
#[derive(Debug, Clone)]
pub struct NewCb {
    state: NewCbState,
    horizon: u64,
    log_horizon: f64,
    mechanism_seed: u64,
    round: u64,
    run: BanditRun,
}

/// What happened in one round. Agent ids are 0-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundOutcome {
    pub round: u64,
    pub designated: usize,
    pub played: usize,
    pub reward: f64,
}

impl NewCb {
    pub fn new(bids: &[f64], b_max: f64, horizon: u64, mechanism_seed: u64) -> Result<Self> {
        if bids.len() < 2 {
            return Err(Error::Config("NewCB needs at least two agents"));
        }
        if horizon == 0 {
            return Err(Error::Config("horizon must be at least 1"));
        }
        check_bids(bids, b_max)?;
        let scale = bids.iter().map(|&b| b / b_max).collect();
        Ok(NewCb {
            state: NewCbState::new(scale),
            horizon,
            log_horizon: log(horizon as f64),
            mechanism_seed,
            round: 0,
            run: BanditRun::new(bids.len(), horizon as usize),
        })
    }

    pub fn state(&self) -> &NewCbState {
        &self.state
    }

    pub fn run(&self) -> &BanditRun {
        &self.run
    }

    pub fn is_done(&self) -> bool {
        self.round >= self.horizon
    }

    pub fn into_parts(self) -> (BanditRun, NewCbState) {
        (self.run, self.state)
    }

    pub fn step<S: RewardSource + ?Sized>(&mut self, rewards: &S) -> RoundOutcome {
        debug_assert!(!self.is_done());
        self.round += 1;
        let t = self.round;
        let n = self.state.agents();
        let designated = (t % n as u64) as usize;
        let played = if self.state.active[designated] {
            designated
        } else {
            self.random_active(t)
        };
        let reward = rewards.reward(played, t, self.run.impressions[played] + 1);
        self.run.record(played, reward);
        if played == designated {
            self.update_bounds(designated, reward);
        }
        self.deactivate();
        RoundOutcome {
            round: t,
            designated,
            played,
            reward,
        }
    }

    fn random_active(&self, t: u64) -> usize {
        let mut best = usize::MAX;
        let mut best_priority = f64::INFINITY;
        for j in self.state.active_agents() {
            let p = unit_at(self.mechanism_seed, t, j as u64);
            if p < best_priority {
                best = j;
                best_priority = p;
            }
        }
        assert!(best != usize::MAX, "NewCB active set became empty");
        best
    }

    fn update_bounds(&mut self, i: usize, reward: f64) {
        let s = &mut self.state;
        s.impressions[i] += 1;
        s.clicks[i] += reward;
        let (l, u) = (s.unit_lower[i], s.unit_upper[i]);
        if l < u {
            let n_i = s.impressions[i] as f64;
            let mean = s.clicks[i] / n_i;
            let radius = sqrt(8.0 * self.log_horizon / n_i);
            let lo = l.max(mean - radius);
            let hi = u.min(mean + radius);
            if lo <= hi {
                s.unit_lower[i] = lo;
                s.unit_upper[i] = hi;
            } else {
                let mid = 0.5 * (l + u);
                s.unit_lower[i] = mid;
                s.unit_upper[i] = mid;
            }
        }
    }

    fn deactivate(&mut self) {
        let best = self.state.best_lower();
        for i in 0..self.state.agents() {
            if self.state.active[i] && self.state.upper(i) < best {
                self.state.active[i] = false;
            }
        }
    }
}

/// Result of a full NewCB run.
#[derive(Debug, Clone, PartialEq)]
pub struct NewCbRun {
    pub run: BanditRun,
    pub state: NewCbState,
    /// Empty unless tracing was requested.
    pub trace: Vec<RoundRecord>,
}

pub fn newcb_run<S: RewardSource + ?Sized>(
    bids: &[f64],
    b_max: f64,
    horizon: u64,
    rewards: &S,
    mechanism_seed: u64,
    trace: bool,
) -> Result<NewCbRun> {
    if rewards.num_agents() != bids.len() {
        return Err(Error::BidCount {
            expected: rewards.num_agents(),
            got: bids.len(),
        });
    }
    let mut alg = NewCb::new(bids, b_max, horizon, mechanism_seed)?;
    let mut records = Vec::new();
    while !alg.is_done() {
        let o = alg.step(rewards);
        if trace {
            records.push(RoundRecord {
                round: o.round,
                designated: o.designated + 1,
                played: o.played + 1,
                reward: o.reward,
                active: alg.state.active_agents().map(|i| i + 1).collect(),
            });
        }
    }
    let (run, state) = alg.into_parts();
    Ok(NewCbRun {
        run,
        state,
        trace: records,
    })
}
