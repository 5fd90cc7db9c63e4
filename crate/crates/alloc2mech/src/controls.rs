//! Deliberately broken or trivial mechanisms and rules. The checks must fail
//! on the broken ones and pass on the trivial ones, which is how their power
//! is demonstrated.

use alloc2mech_core::bandit::regret;
use alloc2mech_core::seed::unit_at;
use alloc2mech_core::{
    AllocationRule, DirectMechanism, Mechanism, Result, RuleSeeds, RunSeeds, SelfResampler,
    Settlement,
};

/// The transformed mechanism with its rebate removed: every agent pays its bid
/// times its allocation, a first-price rule.
pub struct NoRebate<'a, R, S>(pub &'a Mechanism<R, S>);

impl<R: AllocationRule, S: SelfResampler> DirectMechanism for NoRebate<'_, R, S> {
    fn num_agents(&self) -> usize {
        self.0.num_agents()
    }
    fn settle(&self, bids: &[f64], seeds: &RunSeeds) -> Result<Settlement> {
        let o = self.0.run(bids, seeds)?;
        let charge = bids.iter().zip(&o.allocation).map(|(b, a)| b * a).collect();
        Ok(Settlement {
            allocation: o.allocation,
            charge,
        })
    }
}

/// Same allocation for everyone whatever the bids, no payments.
#[derive(Debug, Clone, Copy)]
pub struct ConstantMechanism {
    pub allocation: f64,
    pub agents: usize,
}

impl DirectMechanism for ConstantMechanism {
    fn num_agents(&self) -> usize {
        self.agents
    }
    fn settle(&self, _bids: &[f64], _seeds: &RunSeeds) -> Result<Settlement> {
        Ok(Settlement {
            allocation: vec![self.allocation; self.agents],
            charge: vec![0.0; self.agents],
        })
    }
}

/// Gives the item to the lowest bid: not monotone.
#[derive(Debug, Clone, Copy)]
pub struct LowestBidWins {
    pub agents: usize,
}

impl AllocationRule for LowestBidWins {
    fn num_agents(&self) -> usize {
        self.agents
    }
    fn evaluate(&self, bids: &[f64], _seeds: RuleSeeds) -> Result<Vec<f64>> {
        let mut a = vec![0.0; bids.len()];
        if let Some((w, _)) = bids
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1).then(x.0.cmp(&y.0)))
        {
            a[w] = 1.0;
        }
        Ok(a)
    }
}

/// Plays an agent chosen uniformly at random every round.
pub fn uniform_choices(agents: usize, horizon: u64, seed: u64) -> Vec<usize> {
    (1..=horizon)
        .map(|t| ((unit_at(seed, t, 0) * agents as f64) as usize).min(agents - 1))
        .collect()
}

/// Knows the click-through rates and always plays the best bid-weighted arm.
pub fn oracle_choices(bids: &[f64], ctrs: &[f64], horizon: u64) -> Vec<usize> {
    let best = (0..bids.len())
        .max_by(|&i, &j| {
            (bids[i] * ctrs[i])
                .total_cmp(&(bids[j] * ctrs[j]))
                .then(j.cmp(&i))
        })
        .unwrap_or(0);
    vec![best; horizon as usize]
}

/// Pseudo-regret of a fixed choice sequence.
pub fn choice_regret(choices: &[usize], bids: &[f64], ctrs: &[f64], b_max: f64) -> Result<f64> {
    regret(choices, bids, ctrs, choices.len() as u64, b_max).map(|r| r.regret)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_bid_wins_is_not_monotone() {
        let r = LowestBidWins { agents: 2 };
        assert_eq!(
            r.evaluate(&[0.4, 0.5], RuleSeeds::default()).unwrap(),
            vec![1.0, 0.0]
        );
        assert_eq!(
            r.evaluate(&[0.6, 0.5], RuleSeeds::default()).unwrap(),
            vec![0.0, 1.0]
        );
    }

    #[test]
    fn uniform_regret_is_linear() {
        let (bids, ctrs) = ([1.0, 1.0], [0.75, 0.25]);
        let t = 100_000;
        let r = choice_regret(&uniform_choices(2, t, 1), &bids, &ctrs, 1.0).unwrap();
        // expected T · δ / 2 with δ = 0.5
        assert!((r / t as f64 - 0.25).abs() < 0.01, "{r}");
        let o = choice_regret(&oracle_choices(&bids, &ctrs, t), &bids, &ctrs, 1.0).unwrap();
        assert_eq!(o, 0.0);
    }
}
