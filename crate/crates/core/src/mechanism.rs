//! The allocation-to-mechanism transformation.
//!
//! For every run the mechanism
//! 1. resamples each bid independently into `(x_i, y_i)`,
//! 2. evaluates the allocation rule once on `x`,
//! 3. charges agent `i` the amount `b_i · A_i(x) - R_i`, with the rebate
//!    `R_i = A_i(x) / (mu · F'_i(y_i, b_i))` when `y_i < b_i` and zero otherwise.
//!
//! In expectation the charge equals the Myerson payment of the transformed
//! allocation rule; [`myerson_payment_for_curve`] computes that payment by
//! quadrature so the two can be compared.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::quadrature::{integrate_below, QuadratureConfig};
use crate::resampling::{check_mu, ResamplePair, SelfResampler};
use crate::seed::{derive_seed, ResampleSeed};
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};

/// Randomness an allocation rule may consume: nature's (e.g. clicks) and the
/// rule's own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RuleSeeds {
    pub nature: u64,
    pub mechanism: u64,
}

/// All randomness of one mechanism run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RunSeeds {
    /// Base of the per-agent resampling seeds.
    pub resample: u64,
    pub nature: u64,
    pub mechanism: u64,
}

const RESAMPLE_LABEL: u64 = 0x5245_5341;
const NATURE_LABEL: u64 = 0x4E41_5455;
const MECHANISM_LABEL: u64 = 0x4D45_4348;

impl RunSeeds {
    /// Seeds of trial `trial` under `base`. Each component depends on the
    /// trial index and its own label only, never on bids, so runs at different
    /// bids with the same trial index share their random numbers.
    pub fn for_trial(base: u64, trial: u64) -> Self {
        let t = derive_seed(base, trial);
        RunSeeds {
            resample: derive_seed(t, RESAMPLE_LABEL),
            nature: derive_seed(t, NATURE_LABEL),
            mechanism: derive_seed(t, MECHANISM_LABEL),
        }
    }

    pub fn rule_seeds(&self) -> RuleSeeds {
        RuleSeeds {
            nature: self.nature,
            mechanism: self.mechanism,
        }
    }
}

/// A single-parameter allocation rule. Outcomes are abstracted to the vector
/// of nonnegative per-agent allocations.
pub trait AllocationRule {
    fn num_agents(&self) -> usize;

    /// Type space of `agent`; the resampler paired with the agent must have
    /// the same support.
    fn type_interval(&self, _agent: usize) -> Interval {
        Interval::NON_NEGATIVE
    }

    /// Online rules can only be executed once per mechanism run.
    fn call_once(&self) -> bool {
        false
    }

    fn evaluate(&self, bids: &[f64], seeds: RuleSeeds) -> Result<Vec<f64>>;
}

impl<R: AllocationRule + ?Sized> AllocationRule for &R {
    fn num_agents(&self) -> usize {
        (**self).num_agents()
    }
    fn type_interval(&self, agent: usize) -> Interval {
        (**self).type_interval(agent)
    }
    fn call_once(&self) -> bool {
        (**self).call_once()
    }
    fn evaluate(&self, bids: &[f64], seeds: RuleSeeds) -> Result<Vec<f64>> {
        (**self).evaluate(bids, seeds)
    }
}

/// Wraps a rule and counts `evaluate` calls.
#[derive(Debug)]
pub struct CountingRule<R> {
    pub inner: R,
    calls: AtomicU64,
}

impl<R> CountingRule<R> {
    pub fn new(inner: R) -> Self {
        CountingRule {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }
}

impl<R: AllocationRule> AllocationRule for CountingRule<R> {
    fn num_agents(&self) -> usize {
        self.inner.num_agents()
    }
    fn type_interval(&self, agent: usize) -> Interval {
        self.inner.type_interval(agent)
    }
    fn call_once(&self) -> bool {
        self.inner.call_once()
    }
    fn evaluate(&self, bids: &[f64], seeds: RuleSeeds) -> Result<Vec<f64>> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.evaluate(bids, seeds)
    }
}

/// Bids together with each agent's type interval.
#[derive(Debug, Clone, PartialEq)]
pub struct BidProfile {
    bids: Vec<f64>,
    type_intervals: Vec<Interval>,
}

impl BidProfile {
    pub fn new(bids: Vec<f64>, type_intervals: Vec<Interval>) -> Result<Self> {
        if bids.is_empty() {
            return Err(Error::Config("a bid profile needs at least one agent"));
        }
        if bids.len() != type_intervals.len() {
            return Err(Error::BidCount {
                expected: type_intervals.len(),
                got: bids.len(),
            });
        }
        for (&bid, &support) in bids.iter().zip(&type_intervals) {
            if !support.contains(bid) {
                return Err(Error::OutOfSupport { bid, support });
            }
        }
        Ok(BidProfile {
            bids,
            type_intervals,
        })
    }

    /// Profile whose intervals are those `rule` declares.
    pub fn for_rule<R: AllocationRule + ?Sized>(rule: &R, bids: Vec<f64>) -> Result<Self> {
        let intervals = (0..rule.num_agents())
            .map(|i| rule.type_interval(i))
            .collect();
        Self::new(bids, intervals)
    }

    pub fn bids(&self) -> &[f64] {
        &self.bids
    }

    pub fn type_intervals(&self) -> &[Interval] {
        &self.type_intervals
    }

    pub fn len(&self) -> usize {
        self.bids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty()
    }

    /// `b_{-i}` with `b_i` replaced.
    pub fn with_bid(&self, agent: usize, bid: f64) -> Result<Self> {
        let mut bids = self.bids.clone();
        bids[agent] = bid;
        Self::new(bids, self.type_intervals.clone())
    }
}

/// Allocation and charges of one run of any direct mechanism.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Settlement {
    pub allocation: Vec<f64>,
    pub charge: Vec<f64>,
}

impl Settlement {
    /// Realized utility `t · A - p` of `agent` with true type `t`.
    pub fn utility(&self, agent: usize, true_type: f64) -> f64 {
        true_type * self.allocation[agent] - self.charge[agent]
    }
}

/// Anything that maps bids and seeds to allocations and charges. The harness
/// runs its truthfulness checks against this interface.
pub trait DirectMechanism {
    fn num_agents(&self) -> usize;
    fn settle(&self, bids: &[f64], seeds: &RunSeeds) -> Result<Settlement>;
}

/// Full record of one run of the transformed mechanism.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    pub allocation: Vec<f64>,
    pub charge: Vec<f64>,
    pub rebate: Vec<f64>,
    pub modified: Vec<bool>,
    pub resample_pairs: Vec<ResamplePair>,
}

/// A broken per-run guarantee.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExPostViolation {
    /// `charge != b · A - R`.
    ChargeIdentity { agent: usize },
    /// Rebate paid to an unmodified agent.
    RebateWithoutModification { agent: usize },
    /// Charged while allocated nothing.
    Normalization { agent: usize },
    /// Truthful agent ended with negative utility.
    IndividualRationality { agent: usize, utility: f64 },
    /// Paid more than `b · A · (1/mu - 1)` under the canonical procedure.
    RebateBound { agent: usize, paid: f64, bound: f64 },
}

impl Outcome {
    pub fn any_modified(&self) -> bool {
        self.modified.iter().any(|&m| m)
    }

    pub fn settlement(&self) -> Settlement {
        Settlement {
            allocation: self.allocation.clone(),
            charge: self.charge.clone(),
        }
    }

    /// Checks the per-run guarantees for agents reporting `bids` truthfully.
    /// With `rebate_bound_mu` set, also checks the positive-type bound on the
    /// amount paid out.
    pub fn check_ex_post(
        &self,
        bids: &[f64],
        rebate_bound_mu: Option<f64>,
    ) -> core::result::Result<(), ExPostViolation> {
        for (agent, &b) in bids.iter().enumerate() {
            let a = self.allocation[agent];
            let charge = self.charge[agent];
            let rebate = self.rebate[agent];
            if charge != b * a - rebate {
                return Err(ExPostViolation::ChargeIdentity { agent });
            }
            if !self.modified[agent] && rebate != 0.0 {
                return Err(ExPostViolation::RebateWithoutModification { agent });
            }
            if a == 0.0 && charge != 0.0 {
                return Err(ExPostViolation::Normalization { agent });
            }
            let utility = b * a - charge;
            if utility < 0.0 || rebate < 0.0 {
                return Err(ExPostViolation::IndividualRationality { agent, utility });
            }
            if let Some(mu) = rebate_bound_mu {
                let paid = -charge;
                let stated = b * a * (1.0 / mu - 1.0);
                // equality is attained exactly in real arithmetic
                let tol = 1e-12 * (b * a / mu).abs();
                if paid > stated + tol {
                    return Err(ExPostViolation::RebateBound {
                        agent,
                        paid,
                        bound: stated,
                    });
                }
            }
        }
        Ok(())
    }
}

/// The transformed mechanism. Immutable after construction; `run` is
/// reentrant.
#[derive(Debug)]
pub struct Mechanism<R, S> {
    rule: R,
    mu: f64,
    resamplers: Vec<S>,
}

/// Builds the transformed mechanism. Resampler `i`'s support must equal the
/// rule's type interval for agent `i`.
pub fn alloc_to_mech<R: AllocationRule, S: SelfResampler>(
    rule: R,
    mu: f64,
    resamplers: Vec<S>,
) -> Result<Mechanism<R, S>> {
    check_mu(mu)?;
    if resamplers.len() != rule.num_agents() {
        return Err(Error::Config("one resampler per agent is required"));
    }
    for (i, r) in resamplers.iter().enumerate() {
        if r.support() != rule.type_interval(i) {
            return Err(Error::Config(
                "resampler support differs from the agent's type interval",
            ));
        }
    }
    Ok(Mechanism {
        rule,
        mu,
        resamplers,
    })
}

impl<R: AllocationRule, S: SelfResampler> Mechanism<R, S> {
    pub fn rule(&self) -> &R {
        &self.rule
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn resamplers(&self) -> &[S] {
        &self.resamplers
    }

    pub fn num_agents(&self) -> usize {
        self.resamplers.len()
    }

    /// Resamples `bids` without running the rule.
    pub fn resample(&self, bids: &[f64], resample_seed: u64) -> Result<Vec<ResamplePair>> {
        if bids.len() != self.resamplers.len() {
            return Err(Error::BidCount {
                expected: self.resamplers.len(),
                got: bids.len(),
            });
        }
        bids.iter()
            .zip(&self.resamplers)
            .enumerate()
            .map(|(i, (&b, r))| {
                let support = r.support();
                if !support.contains(b) {
                    return Err(Error::OutOfSupport { bid: b, support });
                }
                let mut streams = ResampleSeed::for_agent(resample_seed, i).streams();
                r.resample(b, self.mu, &mut streams)
            })
            .collect()
    }

    pub fn run(&self, bids: &[f64], seeds: &RunSeeds) -> Result<Outcome> {
        let pairs = self.resample(bids, seeds.resample)?;
        let x: Vec<f64> = pairs.iter().map(|p| p.x).collect();
        let allocation = self.rule.evaluate(&x, seeds.rule_seeds())?;
        if allocation.len() != bids.len() {
            return Err(Error::BidCount {
                expected: bids.len(),
                got: allocation.len(),
            });
        }
        let n = bids.len();
        let mut charge = Vec::with_capacity(n);
        let mut rebate = Vec::with_capacity(n);
        let mut modified = Vec::with_capacity(n);
        for (i, (pair, &a)) in pairs.iter().zip(&allocation).enumerate() {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(Error::InvalidAllocation(i));
            }
            let b = bids[i];
            let r = if pair.y < b && a != 0.0 {
                let fp = self.resamplers[i].distribution_prime(pair.y, b)?;
                a / (self.mu * fp)
            } else {
                0.0
            };
            charge.push(b * a - r);
            rebate.push(r);
            modified.push(pair.modified);
        }
        Ok(Outcome {
            allocation,
            charge,
            rebate,
            modified,
            resample_pairs: pairs,
        })
    }
}

impl<R: AllocationRule, S: SelfResampler> DirectMechanism for Mechanism<R, S> {
    fn num_agents(&self) -> usize {
        self.resamplers.len()
    }
    fn settle(&self, bids: &[f64], seeds: &RunSeeds) -> Result<Settlement> {
        let o = self.run(bids, seeds)?;
        Ok(Settlement {
            allocation: o.allocation,
            charge: o.charge,
        })
    }
}

/// Myerson payment `b · A(b) - ∫_{inf T}^{b} A(u) du` of an allocation curve,
/// with the pivot term fixed at zero.
pub fn myerson_payment_for_curve<F: Fn(f64) -> f64>(
    curve: F,
    bid: f64,
    support: Interval,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !support.contains(bid) {
        return Err(Error::OutOfSupport { bid, support });
    }
    let area = integrate_below(&curve, support.lo, bid, cfg)?;
    Ok(bid * curve(bid) - area)
}

/// Myerson payment of `agent` under a rule that is deterministic once its
/// seeds are fixed.
pub fn myerson_payment_oracle<R: AllocationRule + ?Sized>(
    rule: &R,
    bids: &BidProfile,
    agent: usize,
    seeds: RuleSeeds,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let base = bids.bids();
    let curve = |u: f64| {
        let mut local = base.to_vec();
        local[agent] = u;
        rule.evaluate(&local, seeds)
            .map(|a| a[agent])
            .unwrap_or(f64::NAN)
    };
    let p = myerson_payment_for_curve(curve, base[agent], bids.type_intervals()[agent], cfg)?;
    if p.is_nan() {
        return Err(Error::InvalidAllocation(agent));
    }
    Ok(p)
}
