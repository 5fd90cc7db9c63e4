//! Bounded click rewards beyond Bernoulli.

use alloc2mech_core::bandit::{RewardModel, RewardSource};
use alloc2mech_core::seed::derive_seed;
use rand_distr::{Beta, Distribution};
use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// Rewards in `[0, 1]` drawn from `Beta(m κ, (1 - m) κ)`, so agent `i`'s mean
/// reward is `means[i]` and `κ` sets the concentration. Each (agent, round)
/// cell has its own generator, so the table is addressable like the Bernoulli
/// one.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaClicks {
    means: Vec<f64>,
    laws: Vec<Option<Beta<f64>>>,
    seed: u64,
}

impl BetaClicks {
    pub fn new(means: &[f64], concentration: f64, seed: u64) -> Result<Self, String> {
        if !(concentration > 0.0 && concentration.is_finite()) {
            return Err(format!(
                "beta concentration must be positive, got {concentration}"
            ));
        }
        let laws = means
            .iter()
            .map(|&m| {
                if !(0.0..=1.0).contains(&m) {
                    return Err(format!("mean reward {m} is outside [0, 1]"));
                }
                // degenerate means have no beta law; the reward is the mean
                if m == 0.0 || m == 1.0 {
                    return Ok(None);
                }
                Beta::new(m * concentration, (1.0 - m) * concentration)
                    .map(Some)
                    .map_err(|e| e.to_string())
            })
            .collect::<Result<_, _>>()?;
        Ok(BetaClicks {
            means: means.to_vec(),
            laws,
            seed,
        })
    }
}

impl RewardSource for BetaClicks {
    fn num_agents(&self) -> usize {
        self.means.len()
    }
    fn reward(&self, agent: usize, round: u64, _play: u64) -> f64 {
        match &self.laws[agent] {
            None => self.means[agent],
            Some(law) => {
                let cell = derive_seed(derive_seed(self.seed, agent as u64), round);
                let mut rng = Xoshiro256PlusPlus::seed_from_u64(cell);
                law.sample(&mut rng).clamp(0.0, 1.0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaModel {
    pub means: Vec<f64>,
    pub concentration: f64,
}

impl BetaModel {
    pub fn new(means: Vec<f64>, concentration: f64) -> Result<Self, String> {
        BetaClicks::new(&means, concentration, 0)?;
        Ok(BetaModel {
            means,
            concentration,
        })
    }
}

impl RewardModel for BetaModel {
    type Source = BetaClicks;
    fn num_agents(&self) -> usize {
        self.means.len()
    }
    fn realize(&self, nature_seed: u64) -> BetaClicks {
        BetaClicks::new(&self.means, self.concentration, nature_seed)
            .expect("validated at construction")
    }
}
