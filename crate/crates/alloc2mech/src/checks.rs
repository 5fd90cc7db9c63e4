//! Statistical and exhaustive checks with explicit pass/fail criteria.
//!
//! Every check returns a [`CheckReport`]. Thresholds come in as data through
//! [`Thresholds`]; a failing report carries what is needed to replay the
//! counterexample (base seed, trial index and the derived run seeds).

use crate::error::{Error, Result};
use crate::stats::{agree, BinnedCdf, MCEstimate, Merge, Runner, Welford};
use alloc2mech_core::mechanism::Outcome;
use alloc2mech_core::resampling::{estimate_integral, CanonicalForm, InvertibleLaw};
use alloc2mech_core::seed::{derive_seed, unit_at};
use alloc2mech_core::{
    AllocationRule, DirectMechanism, Mechanism, ResampleSeed, ResampleSource, RuleSeeds, RunSeeds,
    SelfResampler,
};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Too little power to decide.
    Inconclusive,
}

impl Status {
    pub fn from_bool(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub status: Status,
    pub observed: BTreeMap<String, Value>,
    pub thresholds: BTreeMap<String, Value>,
    pub seeds: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, base_seed: u64) -> Self {
        CheckReport {
            check: check.into(),
            status: Status::Pass,
            observed: BTreeMap::new(),
            thresholds: BTreeMap::new(),
            seeds: json!({ "base": base_seed }),
            counterexample: None,
        }
    }

    pub fn observe(mut self, key: &str, v: impl Serialize) -> Self {
        self.observed.insert(key.to_owned(), json!(v));
        self
    }

    pub fn threshold(mut self, key: &str, v: impl Serialize) -> Self {
        self.thresholds.insert(key.to_owned(), json!(v));
        self
    }

    pub fn status(mut self, s: Status) -> Self {
        self.status = s;
        self
    }

    pub fn counterexample(mut self, v: Value) -> Self {
        self.counterexample = Some(v);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn observed_f64(&self, key: &str) -> Option<f64> {
        self.observed.get(key).and_then(Value::as_f64)
    }

    /// One line for the summary table.
    pub fn summary_line(&self) -> String {
        let mut keys: Vec<String> = self
            .observed
            .iter()
            .filter(|(_, v)| v.is_number() || v.is_boolean())
            .take(4)
            .map(|(k, v)| format!("{k}={}", short(v)))
            .collect();
        if self.observed.len() > keys.len() {
            keys.push("…".into());
        }
        format!(
            "{:<13} {:<44} {}",
            self.status.label(),
            self.check,
            keys.join(" ")
        )
    }
}

fn short(v: &Value) -> String {
    match v.as_f64() {
        Some(f) if v.is_f64() => format!("{f:.6}"),
        _ => v.to_string(),
    }
}

/// Replay record of one run.
pub fn replay(base: u64, trial: u64) -> Value {
    let s = RunSeeds::for_trial(base, trial);
    json!({
        "base_seed": base,
        "trial": trial,
        "resample_seed": s.resample,
        "nature_seed": s.nature,
        "mechanism_seed": s.mechanism,
    })
}

/// Pass/fail thresholds shared by all checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// Width of comparison bands in standard errors.
    pub sigma: f64,
    /// Sup-norm bound between conditional CDFs of two procedures.
    pub cdf_sup: f64,
    /// Sup-norm bound for the binned self-similarity comparison.
    pub self_similar_sup: f64,
    /// Cells of the binned conditional CDFs.
    pub cdf_bins: usize,
    /// A truthfulness check is inconclusive when a standard error exceeds this
    /// fraction of the utility scale.
    pub inconclusive_ratio: f64,
    /// Largest allowed max/min ratio of fitted regret constants.
    pub regret_ratio: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            sigma: 3.0,
            cdf_sup: 0.01,
            self_similar_sup: 0.02,
            cdf_bins: 1000,
            inconclusive_ratio: 0.1,
            regret_ratio: 2.0,
        }
    }
}

/// Uniforms addressed by (seed, trial, draw).
pub struct CounterSource {
    seed: u64,
    trial: u64,
    draw: u64,
}

impl CounterSource {
    pub fn new(seed: u64, trial: u64) -> Self {
        CounterSource {
            seed,
            trial,
            draw: 0,
        }
    }
}

impl ResampleSource for CounterSource {
    fn coin(&mut self, p: f64) -> bool {
        self.uniform() <= p
    }
    fn uniform(&mut self) -> f64 {
        self.draw += 1;
        unit_at(self.seed, self.trial, self.draw)
    }
}

/// One-sample integral estimator against a known integral.
#[allow(clippy::too_many_arguments)]
pub fn check_estimator<G, L>(
    name: &str,
    g: G,
    law: &L,
    exact: f64,
    trials: u64,
    seed: u64,
    runner: &Runner,
    th: &Thresholds,
) -> CheckReport
where
    G: Fn(f64) -> f64 + Sync,
    L: InvertibleLaw + Sync,
{
    let w = runner.fold(trials, Welford::new, |w, t| {
        w.push(estimate_integral(&g, law, &mut CounterSource::new(seed, t)));
    });
    let est = w.estimate();
    CheckReport::new(name, seed)
        .observe("mean", est.mean)
        .observe("stderr", est.stderr)
        .observe("trials", est.trials)
        .observe("exact", exact)
        .observe("z", est.z(exact))
        .threshold("sigma", th.sigma)
        .status(Status::from_bool(est.within(exact, th.sigma)))
}

/// Monte Carlo estimate against a known value, within `sigma` standard
/// errors.
pub fn compare_estimate(
    name: &str,
    est: &MCEstimate,
    target: f64,
    seed: u64,
    th: &Thresholds,
) -> CheckReport {
    CheckReport::new(name, seed)
        .observe("mean", est.mean)
        .observe("stderr", est.stderr)
        .observe("trials", est.trials)
        .observe("target", target)
        .observe("z", est.z(target))
        .threshold("sigma", th.sigma)
        .status(Status::from_bool(est.within(target, th.sigma)))
}

/// Mean of the resampled bid `x` against a target.
#[allow(clippy::too_many_arguments)]
pub fn check_resampled_mean<S: SelfResampler + Sync>(
    name: &str,
    resampler: &S,
    bid: f64,
    mu: f64,
    target: f64,
    trials: u64,
    seed: u64,
    runner: &Runner,
    th: &Thresholds,
) -> Result<CheckReport> {
    let w = runner
        .try_fold(trials, Welford::new, |w, t| {
            let mut src = ResampleSeed::new(derive_seed(seed, t)).streams();
            w.push(resampler.resample(bid, mu, &mut src)?.x);
            Ok::<(), alloc2mech_core::Error>(())
        })
        .map_err(|(_, e)| Error::from(e))?;
    Ok(compare_estimate(name, &w.estimate(), target, seed, th)
        .observe("bid", bid)
        .observe("mu", mu))
}

/// A canonical procedure at a given resampling probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Procedure {
    pub form: CanonicalForm,
    pub mu: f64,
}

impl Procedure {
    pub fn label(&self) -> String {
        let f = match self.form {
            CanonicalForm::Recursive => "recursive",
            CanonicalForm::Explicit => "explicit",
        };
        format!("{f}(mu={})", self.mu)
    }
}

struct PairStats {
    unmodified: Welford,
    equal: Welford,
    x: Welford,
    y: Welford,
    xy: Welford,
    x_cdf: BinnedCdf,
    y_cdf: BinnedCdf,
}

impl Merge for PairStats {
    fn merge(&mut self, o: Self) {
        self.unmodified.merge(&o.unmodified);
        self.equal.merge(&o.equal);
        self.x.merge(&o.x);
        self.y.merge(&o.y);
        self.xy.merge(&o.xy);
        self.x_cdf.merge(o.x_cdf);
        self.y_cdf.merge(o.y_cdf);
    }
}

fn pair_stats(
    p: Procedure,
    bid: f64,
    trials: u64,
    seed: u64,
    runner: &Runner,
    bins: usize,
) -> Result<PairStats> {
    let init = || PairStats {
        unmodified: Welford::new(),
        equal: Welford::new(),
        x: Welford::new(),
        y: Welford::new(),
        xy: Welford::new(),
        x_cdf: BinnedCdf::new(0.0, bid, bins),
        y_cdf: BinnedCdf::new(0.0, bid, bins),
    };
    runner
        .try_fold(trials, init, |s, t| {
            let mut src = ResampleSeed::new(derive_seed(seed, t)).streams();
            let r = p.form.resample(bid, p.mu, &mut src)?;
            s.unmodified.push(if r.modified { 0.0 } else { 1.0 });
            s.equal.push(if r.x == r.y { 1.0 } else { 0.0 });
            s.x.push(r.x);
            s.y.push(r.y);
            s.xy.push(r.x * r.y);
            if r.modified {
                s.x_cdf.push(r.x);
                s.y_cdf.push(r.y);
            }
            Ok::<(), alloc2mech_core::Error>(())
        })
        .map_err(|(_, e)| e.into())
}

/// Two procedures produce the same joint law of `(x, y)` at one bid: five
/// summary statistics within `sigma` combined standard errors and binned
/// conditional CDFs of `x` and `y` (given modification) within `cdf_sup`.
pub fn check_distribution_equivalence(
    a: Procedure,
    b: Procedure,
    bid: f64,
    trials: u64,
    seed: u64,
    runner: &Runner,
    th: &Thresholds,
) -> Result<CheckReport> {
    if !(bid > 0.0 && bid.is_finite()) {
        return Err(Error::config(
            "equivalence check needs a positive finite bid",
        ));
    }
    let sa = pair_stats(a, bid, trials, derive_seed(seed, 1), runner, th.cdf_bins)?;
    let sb = pair_stats(b, bid, trials, derive_seed(seed, 2), runner, th.cdf_bins)?;
    let name = format!("distribution_equivalence[{} vs {}]", a.label(), b.label());
    let mut report = CheckReport::new(name, seed)
        .observe("bid", bid)
        .observe("trials_per_procedure", trials)
        .threshold("sigma", th.sigma)
        .threshold("cdf_sup", th.cdf_sup)
        .threshold("cdf_bins", th.cdf_bins);
    let mut pass = true;
    let mut worst: Option<(&str, f64)> = None;
    for (key, wa, wb) in [
        ("p_unmodified", &sa.unmodified, &sb.unmodified),
        ("p_x_equals_y", &sa.equal, &sb.equal),
        ("mean_x", &sa.x, &sb.x),
        ("mean_y", &sa.y, &sb.y),
        ("mean_xy", &sa.xy, &sb.xy),
    ] {
        let (ea, eb) = (wa.estimate(), wb.estimate());
        let z = (ea.mean - eb.mean) / ea.stderr.hypot(eb.stderr);
        let ok = agree(&ea, &eb, th.sigma);
        pass &= ok;
        if !ok && worst.is_none_or(|(_, wz)| z.abs() > wz.abs()) {
            worst = Some((key, z));
        }
        report = report.observe(key, json!({ "a": ea, "b": eb, "z": z }));
    }
    let sup_x = sa.x_cdf.sup_distance(&sb.x_cdf);
    let sup_y = sa.y_cdf.sup_distance(&sb.y_cdf);
    pass &= sup_x <= th.cdf_sup && sup_y <= th.cdf_sup;
    report = report
        .observe("sup_cdf_x_given_modified", sup_x)
        .observe("sup_cdf_y_given_modified", sup_y)
        .status(Status::from_bool(pass));
    if let Some((key, z)) = worst {
        report = report.counterexample(json!({ "statistic": key, "z": z, "base_seed": seed }));
    }
    Ok(report)
}

/// Frequency of runs in which no bid is modified, against the floor `1 - nμ`
/// and the exact value `(1 - μ)^m` over the `m` agents whose bid can move.
pub fn check_identity_probability<R, S>(
    mech: &Mechanism<R, S>,
    bids: &[f64],
    trials: u64,
    seed: u64,
    runner: &Runner,
    th: &Thresholds,
) -> Result<CheckReport>
where
    R: AllocationRule + Sync,
    S: SelfResampler + Sync,
{
    let w = runner
        .try_fold(trials, Welford::new, |w, t| {
            let pairs = mech.resample(bids, RunSeeds::for_trial(seed, t).resample)?;
            w.push(if pairs.iter().any(|p| p.modified) {
                0.0
            } else {
                1.0
            });
            Ok::<(), alloc2mech_core::Error>(())
        })
        .map_err(|(_, e)| Error::from(e))?;
    let est = w.estimate();
    let mu = mech.mu();
    let n = bids.len() as f64;
    let movable = bids.iter().filter(|&&b| b != 0.0).count() as i32;
    let floor = 1.0 - n * mu;
    let exact = (1.0 - mu).powi(movable);
    let pass = est.mean >= floor - th.sigma * est.stderr && est.within(exact, th.sigma);
    Ok(CheckReport::new("identity_probability", seed)
        .observe("agents", bids.len())
        .observe("mu", mu)
        .observe("frequency", est.mean)
        .observe("stderr", est.stderr)
        .observe("trials", est.trials)
        .observe("exact", exact)
        .observe("floor", floor)
        .observe("z_exact", est.z(exact))
        .threshold("sigma", th.sigma)
        .status(Status::from_bool(pass)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeSign {
    /// Values: welfare is `Σ b_i a_i`.
    Positive,
    /// Costs: social cost is `-Σ b_i a_i`.
    Negative,
}

/// Welfare of the transformed mechanism against the rule's own welfare at the
/// true bids. Positive types: `E[W] >= (1 - μ/(2-μ)) · W*`. Negative types:
/// `E[C] <= (1 + μ/(1-2μ)) · C*`. Rules that consume randomness are compared
/// run by run under the same rule seeds.
pub fn check_welfare_factor<R, S>(
    mech: &Mechanism<R, S>,
    bids: &[f64],
    sign: TypeSign,
    trials: u64,
    seed: u64,
    runner: &Runner,
    th: &Thresholds,
) -> Result<CheckReport>
where
    R: AllocationRule + Sync,
    S: SelfResampler + Sync,
{
    let mu = mech.mu();
    let factor = match sign {
        TypeSign::Positive => 1.0 - mu / (2.0 - mu),
        TypeSign::Negative => {
            if mu >= 0.5 {
                return Err(Error::InvalidMu(mu));
            }
            1.0 + mu / (1.0 - 2.0 * mu)
        }
    };
    let value = |alloc: &[f64]| -> f64 {
        let w: f64 = bids.iter().zip(alloc).map(|(b, a)| b * a).sum();
        match sign {
            TypeSign::Positive => w,
            TypeSign::Negative => -w,
        }
    };
    let rule = mech.rule();
    let fixed_opt = if rule.call_once() {
        None
    } else {
        Some(value(&rule.evaluate(bids, RuleSeeds::default())?))
    };
    // (achieved, optimum, slack) where slack >= 0 in expectation under the claim
    let acc = runner
        .try_fold(
            trials,
            || vec![Welford::new(); 3],
            |w, t| {
                let seeds = RunSeeds::for_trial(seed, t);
                let got = value(&mech.run(bids, &seeds)?.allocation);
                let opt = match fixed_opt {
                    Some(v) => v,
                    None => value(&rule.evaluate(bids, seeds.rule_seeds())?),
                };
                let slack = match sign {
                    TypeSign::Positive => got - factor * opt,
                    TypeSign::Negative => factor * opt - got,
                };
                w[0].push(got);
                w[1].push(opt);
                w[2].push(slack);
                Ok::<(), alloc2mech_core::Error>(())
            },
        )
        .map_err(|(_, e)| Error::from(e))?;
    let (got, opt, slack) = (acc[0].estimate(), acc[1].estimate(), acc[2].estimate());
    let pass = slack.mean >= -th.sigma * slack.stderr;
    let name = match sign {
        TypeSign::Positive => "welfare_factor[positive]",
        TypeSign::Negative => "cost_factor[negative]",
    };
    Ok(CheckReport::new(name, seed)
        .observe("mu", mu)
        .observe("achieved", got.mean)
        .observe("achieved_stderr", got.stderr)
        .observe("optimal", opt.mean)
        .observe("ratio", got.mean / opt.mean)
        .observe("factor", factor)
        .observe("slack", slack.mean)
        .observe("slack_stderr", slack.stderr)
        .observe("trials", trials)
        .threshold("sigma", th.sigma)
        .status(Status::from_bool(pass)))
}

/// Monte Carlo mean charge of one agent.
pub fn mc_payment<M: DirectMechanism + Sync>(
    mech: &M,
    bids: &[f64],
    agent: usize,
    trials: u64,
    seed: u64,
    runner: &Runner,
) -> Result<MCEstimate> {
    runner
        .try_fold(trials, Welford::new, |w, t| {
            let s = mech.settle(bids, &RunSeeds::for_trial(seed, t))?;
            w.push(s.charge[agent]);
            Ok::<(), alloc2mech_core::Error>(())
        })
        .map(|w| w.estimate())
        .map_err(|(_, e)| e.into())
}

/// Monte Carlo mean allocations and charges of every agent.
pub fn mc_settlement<M: DirectMechanism + Sync>(
    mech: &M,
    bids: &[f64],
    trials: u64,
    seed: u64,
    runner: &Runner,
) -> Result<(Vec<MCEstimate>, Vec<MCEstimate>)> {
    let n = bids.len();
    let acc = runner
        .try_fold(
            trials,
            || (vec![Welford::new(); n], vec![Welford::new(); n]),
            |(a, p), t| {
                let s = mech.settle(bids, &RunSeeds::for_trial(seed, t))?;
                for i in 0..n {
                    a[i].push(s.allocation[i]);
                    p[i].push(s.charge[i]);
                }
                Ok::<(), alloc2mech_core::Error>(())
            },
        )
        .map_err(|(_, e)| Error::from(e))?;
    Ok((
        acc.0.iter().map(Welford::estimate).collect(),
        acc.1.iter().map(Welford::estimate).collect(),
    ))
}

/// Truthfulness in expectation for one agent: with common random numbers,
/// the utility gain of bidding the true type over every deviation must be
/// at least `-sigma` standard errors of the paired difference.
#[allow(clippy::too_many_arguments)]
pub fn check_truthfulness<M: DirectMechanism + Sync>(
    name: &str,
    mech: &M,
    true_types: &[f64],
    agent: usize,
    deviations: &[f64],
    trials: u64,
    seed: u64,
    runner: &Runner,
    th: &Thresholds,
) -> Result<CheckReport> {
    let t_i = true_types[agent];
    let k = deviations.len();
    // [0..k): truthful minus deviation utility; [k..2k): allocation at each
    // deviation; 2k: truthful utility; 2k+1: truthful allocation
    let acc = runner
        .try_fold(
            trials,
            || vec![Welford::new(); 2 * k + 2],
            |w, t| {
                let seeds = RunSeeds::for_trial(seed, t);
                let truth = mech.settle(true_types, &seeds)?;
                let u0 = truth.utility(agent, t_i);
                let mut bids = true_types.to_vec();
                for (j, &d) in deviations.iter().enumerate() {
                    bids[agent] = d;
                    let s = mech.settle(&bids, &seeds)?;
                    w[j].push(u0 - s.utility(agent, t_i));
                    w[k + j].push(s.allocation[agent]);
                }
                w[2 * k].push(u0);
                w[2 * k + 1].push(truth.allocation[agent]);
                Ok::<(), alloc2mech_core::Error>(())
            },
        )
        .map_err(|(_, e)| Error::from(e))?;
    let gains: Vec<MCEstimate> = acc[..k].iter().map(Welford::estimate).collect();
    // utility at stake: the type times the largest mean allocation the agent
    // can reach over the truthful bid and the grid
    let reach = acc[k..2 * k]
        .iter()
        .chain([&acc[2 * k + 1]])
        .map(Welford::mean)
        .fold(0.0, f64::max);
    let scale = if reach > 0.0 {
        t_i.abs() * reach
    } else {
        t_i.abs()
    };
    let mut worst = 0;
    for (j, g) in gains.iter().enumerate() {
        if g.z(0.0) < gains[worst].z(0.0) {
            worst = j;
        }
    }
    let violated = gains.iter().any(|g| g.mean < -th.sigma * g.stderr);
    let max_se = gains.iter().map(|g| g.stderr).fold(0.0, f64::max);
    let status = if violated {
        Status::Fail
    } else if max_se > th.inconclusive_ratio * scale {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    let mut report = CheckReport::new(name, seed)
        .observe("agent", agent + 1)
        .observe("true_type", t_i)
        .observe("truthful_utility", acc[2 * k].mean())
        .observe("deviations", deviations.len())
        .observe("worst_deviation", deviations.get(worst))
        .observe("worst_gain", gains.get(worst).map(|g| g.mean))
        .observe("worst_gain_stderr", gains.get(worst).map(|g| g.stderr))
        .observe("max_stderr", max_se)
        .observe("utility_scale", scale)
        .observe("trials", trials)
        .observe(
            "gains",
            deviations
                .iter()
                .zip(&gains)
                .map(|(d, g)| json!({ "bid": d, "gain": g.mean, "stderr": g.stderr }))
                .collect::<Vec<_>>(),
        )
        .threshold("sigma", th.sigma)
        .threshold("inconclusive_ratio", th.inconclusive_ratio)
        .status(status);
    if violated {
        report = report.counterexample(json!({
            "agent": agent + 1,
            "deviation": deviations[worst],
            "gain": gains[worst].mean,
            "stderr": gains[worst].stderr,
            "base_seed": seed,
            "trials": trials,
        }));
    }
    Ok(report)
}

/// One sweep of an agent's bid with everything else fixed. `context` carries
/// whatever else the measured rule needs (horizon, rates) and is logged with
/// a counterexample.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityCase<C = ()> {
    pub agent: usize,
    pub bids: Vec<f64>,
    /// Increasing own bids.
    pub grid: Vec<f64>,
    pub seeds: RuleSeeds,
    pub context: C,
}

/// Exact monotonicity: `measure(context, bids, seeds, agent)` must be
/// nondecreasing along every case's grid.
pub fn check_monotonicity<C, F>(
    name: &str,
    cases: &[MonotonicityCase<C>],
    measure: F,
    seed: u64,
    runner: &Runner,
) -> Result<CheckReport>
where
    C: Serialize + Sync,
    F: Fn(&C, &[f64], RuleSeeds, usize) -> alloc2mech_core::Result<f64> + Sync,
{
    let results = runner.map(
        cases,
        |c| -> alloc2mech_core::Result<(u64, Option<Value>)> {
            let mut bids = c.bids.clone();
            let mut last = f64::NEG_INFINITY;
            let mut prev_bid = f64::NAN;
            let mut violations = 0;
            let mut first = None;
            for &b in &c.grid {
                bids[c.agent] = b;
                let v = measure(&c.context, &bids, c.seeds, c.agent)?;
                if v < last {
                    violations += 1;
                    first.get_or_insert_with(|| {
                        json!({
                            "agent": c.agent + 1,
                            "bids": bids,
                            "lower_bid": prev_bid,
                            "higher_bid": b,
                            "value_at_lower": last,
                            "value_at_higher": v,
                            "nature_seed": c.seeds.nature,
                            "mechanism_seed": c.seeds.mechanism,
                            "context": c.context,
                        })
                    });
                }
                last = v;
                prev_bid = b;
            }
            Ok((violations, first))
        },
    );
    let mut violations = 0;
    let mut first = None;
    let mut evaluations = 0;
    for (c, r) in cases.iter().zip(results) {
        let (v, f) = r?;
        violations += v;
        evaluations += c.grid.len();
        if first.is_none() {
            first = f;
        }
    }
    let mut report = CheckReport::new(name, seed)
        .observe("cases", cases.len())
        .observe("evaluations", evaluations)
        .observe("violations", violations)
        .threshold("violations", 0)
        .status(Status::from_bool(violations == 0));
    if let Some(f) = first {
        report = report.counterexample(f);
    }
    Ok(report)
}

/// Fitted regret constants `C(T) = R(T) / sqrt(n T log T)` with `R(T)` the
/// largest mean regret over an instance family; passes when
/// `max C / min C <= regret_ratio`.
#[allow(clippy::too_many_arguments)]
pub fn check_regret_envelope<F>(
    name: &str,
    agents: usize,
    instances: usize,
    horizons: &[u64],
    runs: u64,
    seed: u64,
    regret_of: F,
    runner: &Runner,
    th: &Thresholds,
) -> CheckReport
where
    F: Fn(usize, u64, RuleSeeds) -> f64 + Sync,
{
    let cells = instances * horizons.len();
    let acc = runner.fold(
        cells as u64 * runs,
        || vec![Welford::new(); cells],
        |w, idx| {
            let cell = (idx / runs) as usize;
            let run = idx % runs;
            let (inst, h) = (cell / horizons.len(), cell % horizons.len());
            let s = RunSeeds::for_trial(seed, run);
            w[cell].push(regret_of(inst, horizons[h], s.rule_seeds()));
        },
    );
    let mut rows = Vec::new();
    let mut constants = Vec::new();
    for (h, &t) in horizons.iter().enumerate() {
        let (mut best, mut arg) = (f64::NEG_INFINITY, 0);
        for inst in 0..instances {
            let m = acc[inst * horizons.len() + h].mean();
            if m > best {
                best = m;
                arg = inst;
            }
        }
        let norm = (agents as f64 * t as f64 * (t as f64).ln()).sqrt();
        let c = best / norm;
        constants.push(c);
        let se = acc[arg * horizons.len() + h].stderr();
        rows.push(
            json!({ "horizon": t, "regret": best, "stderr": se, "instance": arg, "constant": c }),
        );
    }
    let c_max = constants.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let c_min = constants.iter().copied().fold(f64::INFINITY, f64::min);
    let (ratio, pass) = if c_max <= 1e-12 {
        (1.0, true)
    } else if c_min <= 0.0 {
        (f64::INFINITY, false)
    } else {
        let r = c_max / c_min;
        (r, r <= th.regret_ratio)
    };
    CheckReport::new(name, seed)
        .observe("agents", agents)
        .observe("instances", instances)
        .observe("runs", runs)
        .observe("c_max", c_max)
        .observe("c_min", c_min)
        .observe(
            "ratio",
            if ratio.is_finite() {
                json!(ratio)
            } else {
                json!("inf")
            },
        )
        .observe("per_horizon", rows)
        .threshold("regret_ratio", th.regret_ratio)
        .status(Status::from_bool(pass))
}

/// Sublinear growth on a fixed instance: `R(T2) - R(T1) <= R(T1)` for
/// `T2 = 10 T1`, with logarithmic regret the increment is about
/// `log(10) / log(T1)` of `R(T1)`.
pub fn check_regret_growth<F>(
    name: &str,
    horizons: (u64, u64),
    runs: u64,
    seed: u64,
    regret_of: F,
    runner: &Runner,
) -> CheckReport
where
    F: Fn(u64, RuleSeeds) -> f64 + Sync,
{
    let acc = runner.fold(
        2 * runs,
        || vec![Welford::new(); 2],
        |w, idx| {
            let (cell, run) = ((idx / runs) as usize, idx % runs);
            let t = if cell == 0 { horizons.0 } else { horizons.1 };
            w[cell].push(regret_of(t, RunSeeds::for_trial(seed, run).rule_seeds()));
        },
    );
    let (small, big) = (acc[0].estimate(), acc[1].estimate());
    let increment = big.mean - small.mean;
    CheckReport::new(name, seed)
        .observe("horizon_small", horizons.0)
        .observe("horizon_big", horizons.1)
        .observe("regret_small", small.mean)
        .observe("regret_small_stderr", small.stderr)
        .observe("regret_big", big.mean)
        .observe("regret_big_stderr", big.stderr)
        .observe("increment", increment)
        .observe("runs", runs)
        .threshold("increment_at_most", "regret_small")
        .status(Status::from_bool(increment <= small.mean))
}

/// Ex-post property counts over many runs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExPostTally {
    pub runs: u64,
    pub violations: u64,
    /// Runs checked against the rebate bound (positive types).
    pub rebate_runs: u64,
    pub rebate_violations: u64,
    /// Smallest failing trial with its description, per kind.
    pub first_violation: Option<(String, u64, String)>,
    pub first_rebate_violation: Option<(String, u64, String)>,
}

impl Merge for ExPostTally {
    fn merge(&mut self, o: Self) {
        self.runs += o.runs;
        self.violations += o.violations;
        self.rebate_runs += o.rebate_runs;
        self.rebate_violations += o.rebate_violations;
        if self.first_violation.is_none() {
            self.first_violation = o.first_violation;
        }
        if self.first_rebate_violation.is_none() {
            self.first_rebate_violation = o.first_rebate_violation;
        }
    }
}

impl ExPostTally {
    /// Records one outcome. `positive_mu` enables the rebate bound.
    pub fn record(
        &mut self,
        scenario: &str,
        trial: u64,
        bids: &[f64],
        o: &Outcome,
        positive_mu: Option<f64>,
    ) {
        self.runs += 1;
        if let Err(e) = o.check_ex_post(bids, None) {
            self.violations += 1;
            self.first_violation
                .get_or_insert_with(|| (scenario.to_owned(), trial, format!("{e:?}")));
        }
        if let Some(mu) = positive_mu {
            self.rebate_runs += 1;
            if let Err(e) = o.check_ex_post(bids, Some(mu)) {
                if matches!(
                    e,
                    alloc2mech_core::mechanism::ExPostViolation::RebateBound { .. }
                ) {
                    self.rebate_violations += 1;
                    self.first_rebate_violation
                        .get_or_insert_with(|| (scenario.to_owned(), trial, format!("{e:?}")));
                }
            }
        }
    }

    fn counterexample(first: &Option<(String, u64, String)>, seed: u64) -> Option<Value> {
        first.as_ref().map(|(s, t, what)| {
            let mut v = replay(seed, *t);
            v["scenario"] = json!(s);
            v["violation"] = json!(what);
            v
        })
    }

    pub fn ex_post_report(&self, seed: u64) -> CheckReport {
        let mut r = CheckReport::new("ex_post_ir_and_normalization", seed)
            .observe("runs", self.runs)
            .observe("violations", self.violations)
            .threshold("violations", 0)
            .status(Status::from_bool(self.violations == 0 && self.runs > 0));
        if let Some(c) = Self::counterexample(&self.first_violation, seed) {
            r = r.counterexample(c);
        }
        r
    }

    pub fn rebate_report(&self, seed: u64) -> CheckReport {
        let mut r = CheckReport::new("rebate_bound", seed)
            .observe("runs", self.rebate_runs)
            .observe("violations", self.rebate_violations)
            .threshold("violations", 0)
            .threshold("relative_rounding_slack", 1e-12)
            .status(Status::from_bool(
                self.rebate_violations == 0 && self.rebate_runs > 0,
            ));
        if let Some(c) = Self::counterexample(&self.first_rebate_violation, seed) {
            r = r.counterexample(c);
        }
        r
    }
}

/// Runs the mechanism `trials` times and tallies ex-post violations.
pub fn ex_post_tally<R, S>(
    scenario: &str,
    mech: &Mechanism<R, S>,
    bids: &[f64],
    positive_mu: Option<f64>,
    trials: u64,
    seed: u64,
    runner: &Runner,
) -> Result<ExPostTally>
where
    R: AllocationRule + Sync,
    S: SelfResampler + Sync,
{
    runner
        .try_fold(trials, ExPostTally::default, |tally, t| {
            let o = mech.run(bids, &RunSeeds::for_trial(seed, t))?;
            tally.record(scenario, t, bids, &o, positive_mu);
            Ok::<(), alloc2mech_core::Error>(())
        })
        .map_err(|(_, e)| e.into())
}

/// Runs sequentially and reads `calls` around every run: each must add
/// exactly one evaluation.
pub fn check_single_call<R, S>(
    name: &str,
    mech: &Mechanism<R, S>,
    bids: &[f64],
    trials: u64,
    seed: u64,
    calls: impl Fn() -> u64,
) -> Result<CheckReport>
where
    R: AllocationRule,
    S: SelfResampler,
{
    let mut bad = None;
    let mut bad_runs = 0u64;
    for t in 0..trials {
        let before = calls();
        mech.run(bids, &RunSeeds::for_trial(seed, t))?;
        let d = calls() - before;
        if d != 1 {
            bad_runs += 1;
            bad.get_or_insert((t, d));
        }
    }
    let mut r = CheckReport::new(name, seed)
        .observe("runs", trials)
        .observe("runs_without_exactly_one_call", bad_runs)
        .threshold("calls_per_run", 1)
        .status(Status::from_bool(bad_runs == 0));
    if let Some((t, d)) = bad {
        let mut v = replay(seed, t);
        v["calls"] = json!(d);
        r = r.counterexample(v);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controls::{ConstantMechanism, LowestBidWins, NoRebate};
    use alloc2mech_core::alloc_to_mech;
    use alloc2mech_core::offline::SingleItem;
    use alloc2mech_core::resampling::{Canonical, UniformLaw};

    fn runner() -> Runner {
        Runner::with_workers(2)
    }

    #[test]
    fn estimator_passes_on_cubic() {
        let r = check_estimator(
            "estimator",
            |z| 3.0 * z * z,
            &UniformLaw { lo: 0.0, hi: 1.0 },
            1.0,
            100_000,
            1,
            &runner(),
            &Thresholds::default(),
        );
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn equivalence_detects_different_mu() {
        let th = Thresholds::default();
        let a = Procedure {
            form: CanonicalForm::Explicit,
            mu: 0.3,
        };
        let b = Procedure {
            form: CanonicalForm::Explicit,
            mu: 0.5,
        };
        let r = check_distribution_equivalence(a, b, 1.0, 100_000, 3, &runner(), &th).unwrap();
        assert_eq!(r.status, Status::Fail);
        let z = r.observed["p_unmodified"]["z"].as_f64().unwrap();
        assert!(z.abs() > 20.0);
        // the 0.01 sup-norm band is calibrated for 10^6 samples per side
        let same = check_distribution_equivalence(b, b, 1.0, 1_000_000, 3, &runner(), &th).unwrap();
        assert!(same.passed(), "{same:?}");
    }

    #[test]
    fn identity_probability_edge_cases() {
        let th = Thresholds::default();
        let m = alloc_to_mech(SingleItem::new(1), 0.5, vec![Canonical::default()]).unwrap();
        let r = check_identity_probability(&m, &[1.0], 50_000, 2, &runner(), &th).unwrap();
        assert!(r.passed());
        assert!((r.observed_f64("frequency").unwrap() - 0.5).abs() < 0.01);
        let m = alloc_to_mech(SingleItem::new(2), 1e-4, vec![Canonical::default(); 2]).unwrap();
        let r = check_identity_probability(&m, &[1.0, 2.0], 20_000, 2, &runner(), &th).unwrap();
        assert!(r.observed_f64("frequency").unwrap() > 0.998);
    }

    #[test]
    fn welfare_factor_rejects_large_mu_for_costs() {
        let m = alloc_to_mech(SingleItem::new(1), 0.6, vec![Canonical::default()]).unwrap();
        let th = Thresholds::default();
        assert!(matches!(
            check_welfare_factor(&m, &[1.0], TypeSign::Negative, 10, 0, &runner(), &th),
            Err(Error::InvalidMu(_))
        ));
    }

    #[test]
    fn welfare_factor_small_mu_is_near_one() {
        let m = alloc_to_mech(SingleItem::new(3), 0.001, vec![Canonical::default(); 3]).unwrap();
        let th = Thresholds::default();
        let r = check_welfare_factor(
            &m,
            &[1.0, 2.0, 3.0],
            TypeSign::Positive,
            20_000,
            0,
            &runner(),
            &th,
        )
        .unwrap();
        assert!(r.passed());
        assert!(r.observed_f64("ratio").unwrap() > 0.99);
    }

    #[test]
    fn truthfulness_power_and_trivial_pass() {
        let th = Thresholds::default();
        let types = [0.5, 0.7, 0.9];
        let devs: Vec<f64> = (1..=10).map(|k| 0.12 * k as f64).collect();
        let m = alloc_to_mech(SingleItem::new(3), 0.2, vec![Canonical::default(); 3]).unwrap();
        let broken = NoRebate(&m);
        let r = check_truthfulness(
            "no_rebate",
            &broken,
            &types,
            2,
            &devs,
            20_000,
            5,
            &runner(),
            &th,
        )
        .unwrap();
        assert_eq!(r.status, Status::Fail);
        let d = r.counterexample.as_ref().unwrap()["deviation"]
            .as_f64()
            .unwrap();
        assert!(d < 0.9);
        let constant = ConstantMechanism {
            allocation: 0.5,
            agents: 3,
        };
        let r = check_truthfulness(
            "constant",
            &constant,
            &types,
            0,
            &devs,
            1000,
            5,
            &runner(),
            &th,
        )
        .unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn monotonicity_finds_lowest_bid_wins() {
        let cases = vec![MonotonicityCase {
            agent: 0,
            bids: vec![0.0, 0.5],
            grid: vec![0.1, 0.4, 0.6, 0.9],
            seeds: RuleSeeds::default(),
            context: (),
        }];
        let rule = LowestBidWins { agents: 2 };
        let r = check_monotonicity(
            "lowest",
            &cases,
            |_, b, s, i| rule.evaluate(b, s).map(|a| a[i]),
            0,
            &runner(),
        )
        .unwrap();
        assert_eq!(r.status, Status::Fail);
        let c = r.counterexample.unwrap();
        assert_eq!(c["lower_bid"], json!(0.4));
        assert_eq!(c["higher_bid"], json!(0.6));
        let single = SingleItem::new(2);
        let r = check_monotonicity(
            "single",
            &cases,
            |_, b, s, i| single.evaluate(b, s).map(|a| a[i]),
            0,
            &runner(),
        )
        .unwrap();
        assert!(r.passed());
    }

    #[test]
    fn envelope_zero_and_linear() {
        let th = Thresholds::default();
        let zero = check_regret_envelope(
            "oracle",
            2,
            1,
            &[1000, 10_000],
            4,
            0,
            |_, _, _| 0.0,
            &runner(),
            &th,
        );
        assert!(zero.passed());
        // uniform random play on a gap-0.5 instance: regret T·δ/2
        let lin = check_regret_envelope(
            "uniform",
            2,
            1,
            &[1000, 10_000, 100_000],
            4,
            0,
            |_, t, _| t as f64 * 0.25,
            &runner(),
            &th,
        );
        assert_eq!(lin.status, Status::Fail);
    }

    #[test]
    fn reports_serialize_deterministically() {
        let r = CheckReport::new("x", 7)
            .observe("b", 1.5)
            .observe("a", 2)
            .threshold("sigma", 3.0);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            r#"{"check":"x","status":"pass","observed":{"a":2,"b":1.5},"thresholds":{"sigma":3.0},"seeds":{"base":7}}"#
        );
    }
}
