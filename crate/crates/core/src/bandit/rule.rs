use super::induced::{check_bids, run_induced, Ucb1};
use super::newcb::newcb_run;
use super::realization::{BernoulliClicks, BernoulliStack, RewardSource};
use super::{normalize_bids, BanditRun};
use crate::error::{Error, Result};
use crate::mechanism::{AllocationRule, RuleSeeds};
use alloc::borrow::Cow;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BanditAlgorithm {
    /// The rule UCB1 induces through modified rewards.
    Ucb1,
    NewCb,
}

/// Builds the reward realization for one run from the nature seed.
pub trait RewardModel {
    type Source: RewardSource;
    fn num_agents(&self) -> usize;
    fn realize(&self, nature_seed: u64) -> Self::Source;
}

/// Bernoulli clicks indexed by round.
#[derive(Debug, Clone, PartialEq)]
pub struct ClickModel(pub Vec<f64>);

/// Bernoulli clicks indexed by play count.
#[derive(Debug, Clone, PartialEq)]
pub struct StackModel(pub Vec<f64>);

impl RewardModel for ClickModel {
    type Source = BernoulliClicks;
    fn num_agents(&self) -> usize {
        self.0.len()
    }
    fn realize(&self, seed: u64) -> BernoulliClicks {
        BernoulliClicks {
            ctrs: self.0.clone(),
            seed,
        }
    }
}

impl RewardModel for StackModel {
    type Source = BernoulliStack;
    fn num_agents(&self) -> usize {
        self.0.len()
    }
    fn realize(&self, seed: u64) -> BernoulliStack {
        BernoulliStack {
            ctrs: self.0.clone(),
            seed,
        }
    }
}

/// A bandit algorithm viewed as a single-call allocation rule: one evaluation
/// is one full run of `horizon` rounds, and agent `i`'s allocation is its total
/// click reward.
///
/// With `normalize` the bids are divided by their maximum before the run and
/// `b_max` is ignored.
#[derive(Debug, Clone)]
pub struct BanditRule<M> {
    pub algorithm: BanditAlgorithm,
    pub model: M,
    pub horizon: u64,
    pub b_max: f64,
    pub normalize: bool,
}

impl<M: RewardModel> BanditRule<M> {
    pub fn new(algorithm: BanditAlgorithm, model: M, horizon: u64, b_max: f64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Config("horizon must be at least 1"));
        }
        check_bids(&[], b_max)?;
        Ok(BanditRule {
            algorithm,
            model,
            horizon,
            b_max,
            normalize: false,
        })
    }

    pub fn normalized(mut self) -> Self {
        self.normalize = true;
        self
    }

    /// Full run record for the given bids and seeds.
    pub fn play(&self, bids: &[f64], seeds: RuleSeeds) -> Result<BanditRun> {
        if bids.len() != self.model.num_agents() {
            return Err(Error::BidCount {
                expected: self.model.num_agents(),
                got: bids.len(),
            });
        }
        let (bids, b_max) = if self.normalize {
            (Cow::Owned(normalize_bids(bids)?), 1.0)
        } else {
            (Cow::Borrowed(bids), self.b_max)
        };
        let source = self.model.realize(seeds.nature);
        match self.algorithm {
            BanditAlgorithm::Ucb1 => run_induced(&Ucb1, &bids, b_max, self.horizon, &source),
            BanditAlgorithm::NewCb => {
                newcb_run(&bids, b_max, self.horizon, &source, seeds.mechanism, false)
                    .map(|r| r.run)
            }
        }
    }
}

impl<M: RewardModel> AllocationRule for BanditRule<M> {
    fn num_agents(&self) -> usize {
        self.model.num_agents()
    }
    fn call_once(&self) -> bool {
        true
    }
    fn evaluate(&self, bids: &[f64], seeds: RuleSeeds) -> Result<Vec<f64>> {
        self.play(bids, seeds).map(|r| r.clicks)
    }
}
