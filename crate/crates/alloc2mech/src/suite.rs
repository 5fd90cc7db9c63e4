//! The twelve acceptance criteria as functions of their sample sizes.
//!
//! [`SuiteParams::full`] pins the sizes the criteria are stated at;
//! [`SuiteParams::quick`] shrinks them for smoke runs. Each criterion yields
//! one or more [`CheckReport`]s and passes when all of them pass.

use crate::checks::{
    check_distribution_equivalence, check_estimator, check_identity_probability,
    check_monotonicity, check_regret_envelope, check_regret_growth, check_resampled_mean,
    check_single_call, check_truthfulness, check_welfare_factor, compare_estimate, ex_post_tally,
    mc_settlement, CheckReport, ExPostTally, MonotonicityCase, Procedure, Status, Thresholds,
    TypeSign,
};
use crate::controls::NoRebate;
use crate::error::Result;
use crate::graphgen::{diamond, ring_with_chords};
use crate::oracle::transformed_payment;
use crate::stats::{Merge, Runner};
use alloc2mech_core::bandit::{
    newcb_run, regret, BanditAlgorithm, BanditRule, BernoulliClicks, ClickModel, StackModel,
};
use alloc2mech_core::offline::{EffRule, KUnit, SingleItem};
use alloc2mech_core::quadrature::QuadratureConfig;
use alloc2mech_core::resampling::{
    AnyResampler, Canonical, CanonicalForm, HCanonical, NegativeSqrtMap, UniformLaw,
};
use alloc2mech_core::seed::{derive_seed, unit_at};
use alloc2mech_core::{alloc_to_mech, RuleSeeds};
use serde::Serialize;
use serde_json::json;

/// Sample sizes of every criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteParams {
    pub seed: u64,
    pub estimator_samples: u64,
    pub equivalence_samples: u64,
    pub shrink_samples: u64,
    pub payment_trials: u64,
    pub truthful_trials: u64,
    /// Total ex-post runs, split across scenarios by fixed shares.
    pub ex_post_runs: u64,
    pub identity_trials: u64,
    pub path_graphs: u64,
    pub path_nodes: usize,
    pub path_trials: u64,
    pub newcb_realizations: u64,
    pub newcb_horizon: u64,
    pub ucb_realizations: u64,
    pub ucb_horizons: Vec<u64>,
    /// Bid points per sweep for the bandit monotonicity criteria.
    pub grid_points: usize,
    pub regret_runs: u64,
    pub regret_horizons: Vec<u64>,
    pub regret_gaps: Vec<f64>,
    pub growth_gap: f64,
    pub growth_horizons: (u64, u64),
}

impl SuiteParams {
    pub fn full(seed: u64) -> Self {
        SuiteParams {
            seed,
            estimator_samples: 100_000,
            equivalence_samples: 1_000_000,
            shrink_samples: 1_000_000,
            payment_trials: 1_000_000,
            truthful_trials: 1_000_000,
            ex_post_runs: 10_000_000,
            identity_trials: 1_000_000,
            path_graphs: 3,
            path_nodes: 50,
            path_trials: 100_000,
            newcb_realizations: 50,
            newcb_horizon: 200,
            ucb_realizations: 10,
            ucb_horizons: vec![10, 31, 60],
            grid_points: 20,
            regret_runs: 200,
            regret_horizons: vec![1_000, 10_000, 100_000],
            regret_gaps: vec![0.8, 0.4, 0.2, 0.1, 0.05, 0.025],
            growth_gap: 0.2,
            growth_horizons: (10_000, 100_000),
        }
    }

    /// Small sizes for smoke tests. Statistical verdicts at these sizes are
    /// weaker but the code paths are the same.
    pub fn quick(seed: u64) -> Self {
        SuiteParams {
            seed,
            estimator_samples: 20_000,
            equivalence_samples: 50_000,
            shrink_samples: 50_000,
            payment_trials: 50_000,
            truthful_trials: 20_000,
            ex_post_runs: 200_000,
            identity_trials: 50_000,
            path_graphs: 1,
            path_nodes: 20,
            path_trials: 5_000,
            newcb_realizations: 3,
            newcb_horizon: 60,
            ucb_realizations: 2,
            ucb_horizons: vec![10, 31],
            grid_points: 8,
            regret_runs: 20,
            regret_horizons: vec![1_000, 3_000, 10_000],
            regret_gaps: vec![0.4, 0.2, 0.1],
            growth_gap: 0.2,
            growth_horizons: (1_000, 10_000),
        }
    }

    fn sub(&self, label: u64) -> u64 {
        derive_seed(self.seed, label)
    }
}

/// Result of one acceptance criterion.
#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub reports: Vec<CheckReport>,
    /// Wall-clock limit the criterion is stated with, if any.
    pub budget_secs: Option<f64>,
}

impl Criterion {
    fn new(
        id: u8,
        title: &'static str,
        budget_secs: Option<f64>,
        reports: Vec<CheckReport>,
    ) -> Self {
        Criterion {
            id,
            title,
            reports,
            budget_secs,
        }
    }

    pub fn passed(&self) -> bool {
        !self.reports.is_empty() && self.reports.iter().all(CheckReport::passed)
    }
}

/// Bids of the three-agent single-item auction used by several criteria.
pub const AUCTION_BIDS: [f64; 3] = [0.5, 0.7, 0.9];
pub const AUCTION_MU: f64 = 0.2;

fn canonical(n: usize) -> Vec<Canonical> {
    vec![Canonical::default(); n]
}

pub fn estimator(p: &SuiteParams, runner: &Runner, th: &Thresholds) -> Criterion {
    let r = check_estimator(
        "estimator_unbiased[g=3z^2,uniform]",
        |z| 3.0 * z * z,
        &UniformLaw { lo: 0.0, hi: 1.0 },
        1.0,
        p.estimator_samples,
        p.sub(1),
        runner,
        th,
    );
    Criterion::new(1, "estimator unbiasedness", Some(1.0), vec![r])
}

pub fn equivalence(p: &SuiteParams, runner: &Runner, th: &Thresholds) -> Result<Criterion> {
    let a = Procedure {
        form: CanonicalForm::Recursive,
        mu: 0.5,
    };
    let b = Procedure {
        form: CanonicalForm::Explicit,
        mu: 0.5,
    };
    let r = check_distribution_equivalence(a, b, 1.0, p.equivalence_samples, p.sub(2), runner, th)?;
    Ok(Criterion::new(
        2,
        "recursive and explicit procedures agree",
        Some(10.0),
        vec![r],
    ))
}

/// `(1 - μ/(2-μ)) b` for positive bids.
pub fn shrink_target(mu: f64, b: f64) -> f64 {
    (1.0 - mu / (2.0 - mu)) * b
}

/// `(1 + μ/(1-2μ)) b` for negative bids.
pub fn blow_up_target(mu: f64, b: f64) -> f64 {
    (1.0 + mu / (1.0 - 2.0 * mu)) * b
}

pub fn shrink_and_blow_up(p: &SuiteParams, runner: &Runner, th: &Thresholds) -> Result<Criterion> {
    let shrink = check_resampled_mean(
        "shrink_factor[mu=0.5,b=1]",
        &Canonical::default(),
        1.0,
        0.5,
        shrink_target(0.5, 1.0),
        p.shrink_samples,
        p.sub(3),
        runner,
        th,
    )?;
    let blow = check_resampled_mean(
        "blow_up_factor[mu=0.25,b=-1]",
        &HCanonical::new(NegativeSqrtMap, CanonicalForm::Recursive),
        -1.0,
        0.25,
        blow_up_target(0.25, -1.0),
        p.shrink_samples,
        p.sub(4),
        runner,
        th,
    )?;
    Ok(Criterion::new(
        3,
        "shrink and blow-up factors",
        None,
        vec![shrink, blow],
    ))
}

pub fn payments(p: &SuiteParams, runner: &Runner, th: &Thresholds) -> Result<Criterion> {
    let mech = alloc_to_mech(SingleItem::new(3), AUCTION_MU, canonical(3))?;
    let seed = p.sub(5);
    let (alloc, charge) = mc_settlement(&mech, &AUCTION_BIDS, p.payment_trials, seed, runner)?;
    let cfg = QuadratureConfig::default();
    let mut reports = Vec::new();
    for i in 0..3 {
        let oracle = transformed_payment(&AUCTION_BIDS, i, AUCTION_MU, &cfg)?;
        reports.push(
            compare_estimate(
                &format!("payment_vs_myerson[agent={}]", i + 1),
                &charge[i],
                oracle,
                seed,
                th,
            )
            .observe("bid", AUCTION_BIDS[i])
            .observe("mean_allocation", alloc[i].mean),
        );
    }
    Ok(Criterion::new(
        4,
        "implicit payments match the Myerson oracle",
        Some(60.0),
        reports,
    ))
}

/// Twenty deviations spread over `(0, 2 max b]`.
pub fn deviation_grid(bids: &[f64]) -> Vec<f64> {
    let top = bids.iter().copied().fold(0.0, f64::max);
    (1..=20).map(|k| 2.0 * top * k as f64 / 20.0).collect()
}

pub fn truthfulness(p: &SuiteParams, runner: &Runner, th: &Thresholds) -> Result<Criterion> {
    let mech = alloc_to_mech(SingleItem::new(3), AUCTION_MU, canonical(3))?;
    let devs = deviation_grid(&AUCTION_BIDS);
    let seed = p.sub(6);
    let mut reports = Vec::new();
    let mut broken = Vec::new();
    for i in 0..3 {
        reports.push(check_truthfulness(
            &format!("truthful[agent={}]", i + 1),
            &mech,
            &AUCTION_BIDS,
            i,
            &devs,
            p.truthful_trials,
            seed,
            runner,
            th,
        )?);
        broken.push(check_truthfulness(
            &format!("truthful_no_rebate[agent={}]", i + 1),
            &NoRebate(&mech),
            &AUCTION_BIDS,
            i,
            &devs,
            p.truthful_trials,
            seed,
            runner,
            th,
        )?);
    }
    let detected = broken.iter().filter(|r| r.status == Status::Fail).count();
    let power = CheckReport::new("power[no_rebate_must_fail]", seed)
        .observe("agents_failing", detected)
        .observe("agents", broken.len())
        .observe("reports", &broken)
        .threshold("agents_failing_at_least", 1)
        .status(Status::from_bool(detected >= 1));
    reports.push(power);
    Ok(Criterion::new(
        5,
        "truthfulness in expectation with power check",
        None,
        reports,
    ))
}

/// Ex-post IR and normalization over a fixed mix of scenarios, and the rebate
/// bound over its positive-type part. Returns criteria 6 and 12.
pub fn ex_post(p: &SuiteParams, runner: &Runner) -> Result<(Criterion, Criterion)> {
    let total = p.ex_post_runs;
    let share = |num: u64| total * num / 1000;
    let mut tally = ExPostTally::default();
    let seed = p.sub(7);

    let single3 = alloc_to_mech(SingleItem::new(3), AUCTION_MU, canonical(3))?;
    tally.merge(ex_post_tally(
        "single-item[n=3,mu=0.2]",
        &single3,
        &AUCTION_BIDS,
        Some(AUCTION_MU),
        share(250),
        derive_seed(seed, 1),
        runner,
    )?);

    let bids5 = [0.3, 2.0, 1.1, 0.0, 1.7];
    let single5 = alloc_to_mech(SingleItem::new(5), 0.5, canonical(5))?;
    tally.merge(ex_post_tally(
        "single-item[n=5,mu=0.5]",
        &single5,
        &bids5,
        Some(0.5),
        share(250),
        derive_seed(seed, 2),
        runner,
    )?);

    let kunit = alloc_to_mech(KUnit::new(5, 2, 1)?, 0.3, canonical(5))?;
    tally.merge(ex_post_tally(
        "k-unit[n=5,k=2,cap=1,mu=0.3]",
        &kunit,
        &[1.0, 4.0, 2.5, 3.0, 0.5],
        Some(0.3),
        share(200),
        derive_seed(seed, 3),
        runner,
    )?);

    let kunit2 = alloc_to_mech(KUnit::new(4, 3, 2)?, 0.7, canonical(4))?;
    tally.merge(ex_post_tally(
        "k-unit[n=4,k=3,cap=2,mu=0.7]",
        &kunit2,
        &[0.0, 1.0, 2.0, 3.0],
        Some(0.7),
        share(190),
        derive_seed(seed, 4),
        runner,
    )?);

    let sp = alloc_to_mech(
        EffRule::new(diamond())?,
        0.1,
        vec![AnyResampler::negative_sqrt(); 4],
    )?;
    tally.merge(ex_post_tally(
        "shortest-path[diamond,mu=0.1]",
        &sp,
        &[-1.0, -2.0, -2.0, -2.0],
        None,
        share(50),
        derive_seed(seed, 5),
        runner,
    )?);

    let (g, costs) = ring_with_chords(12, 10, derive_seed(seed, 6))?;
    let m = g.num_agents();
    let sp2 = alloc_to_mech(
        EffRule::new(g)?,
        0.3,
        vec![AnyResampler::negative_sqrt(); m],
    )?;
    let cost_bids: Vec<f64> = costs.iter().map(|c| -c).collect();
    tally.merge(ex_post_tally(
        "shortest-path[ring12,mu=0.3]",
        &sp2,
        &cost_bids,
        None,
        share(50),
        derive_seed(seed, 7),
        runner,
    )?);

    let newcb = BanditRule::new(
        BanditAlgorithm::NewCb,
        ClickModel(vec![0.3, 0.5, 0.7]),
        50,
        1.0,
    )?;
    let mab1 = alloc_to_mech(newcb, 0.1, canonical(3))?;
    tally.merge(ex_post_tally(
        "mab-newcb[n=3,T=50,mu=0.1]",
        &mab1,
        &[1.0, 0.6, 0.4],
        Some(0.1),
        share(5),
        derive_seed(seed, 8),
        runner,
    )?);

    let ucb = BanditRule::new(BanditAlgorithm::Ucb1, StackModel(vec![0.6, 0.4]), 50, 1.0)?;
    let mab2 = alloc_to_mech(ucb, 0.4, canonical(2))?;
    tally.merge(ex_post_tally(
        "mab-ucb1[n=2,T=50,mu=0.4]",
        &mab2,
        &[0.8, 1.0],
        Some(0.4),
        share(5),
        derive_seed(seed, 9),
        runner,
    )?);

    let c6 = Criterion::new(
        6,
        "universal ex-post IR and normalization",
        None,
        vec![tally.ex_post_report(seed)],
    );
    let c12 = Criterion::new(
        12,
        "rebate bound on positive-type runs",
        None,
        vec![tally.rebate_report(seed)],
    );
    Ok((c6, c12))
}

pub fn identity(p: &SuiteParams, runner: &Runner, th: &Thresholds) -> Result<Criterion> {
    let mech = alloc_to_mech(SingleItem::new(3), 0.1, canonical(3))?;
    let r = check_identity_probability(
        &mech,
        &AUCTION_BIDS,
        p.identity_trials,
        p.sub(8),
        runner,
        th,
    )?;
    Ok(Criterion::new(7, "identity probability", None, vec![r]))
}

pub fn shortest_path(p: &SuiteParams, runner: &Runner, th: &Thresholds) -> Result<Criterion> {
    let mut reports = Vec::new();
    for k in 0..p.path_graphs {
        let gseed = derive_seed(p.sub(9), k);
        let (g, costs) = ring_with_chords(p.path_nodes, p.path_nodes * 3 / 2, gseed)?;
        let m = g.num_agents();
        let mech = alloc_to_mech(
            EffRule::new(g)?,
            0.1,
            vec![AnyResampler::negative_sqrt(); m],
        )?;
        let bids: Vec<f64> = costs.iter().map(|c| -c).collect();
        let seed = derive_seed(gseed, 1);
        let cost = check_welfare_factor(
            &mech,
            &bids,
            TypeSign::Negative,
            p.path_trials,
            seed,
            runner,
            th,
        )?;
        reports.push(
            rename(
                cost,
                &format!("cost_factor[graph={k},nodes={}]", p.path_nodes),
            )
            .observe("graph_seed", gseed),
        );
        let calls = check_single_call(
            &format!("dijkstra_calls[graph={k}]"),
            &mech,
            &bids,
            p.path_trials,
            seed,
            || mech.rule().dijkstra_calls(),
        )?;
        reports.push(calls);
    }
    Ok(Criterion::new(
        8,
        "shortest-path cost factor and single Dijkstra call",
        None,
        reports,
    ))
}

fn rename(mut r: CheckReport, name: &str) -> CheckReport {
    r.check = name.to_owned();
    r
}

fn grid(points: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..points)
        .map(|k| lo + (hi - lo) * k as f64 / (points - 1).max(1) as f64)
        .collect()
}

/// Click-through rates in `[0.1, 0.9]` derived from a realization seed.
fn rates(seed: u64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.1 + 0.8 * unit_at(seed, 0xC7, i as u64))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct BanditContext {
    pub horizon: u64,
    pub ctrs: Vec<f64>,
}

fn sweep_cases(
    agents: usize,
    others: &[Vec<f64>],
    grid: &[f64],
    seeds: RuleSeeds,
    ctx: &BanditContext,
) -> Vec<MonotonicityCase<BanditContext>> {
    let mut cases = Vec::new();
    for agent in 0..agents {
        for o in others {
            let mut bids = o.clone();
            bids.insert(agent, 0.0);
            cases.push(MonotonicityCase {
                agent,
                bids,
                grid: grid.to_vec(),
                seeds,
                context: ctx.clone(),
            });
        }
    }
    cases
}

pub fn newcb_monotonicity(p: &SuiteParams, runner: &Runner) -> Result<Criterion> {
    let g = grid(p.grid_points, 0.05, 1.0);
    let others: Vec<Vec<f64>> = g.iter().map(|&b| vec![b]).collect();
    let seed = p.sub(10);
    let mut cases = Vec::new();
    for r in 0..p.newcb_realizations {
        let s = derive_seed(seed, r);
        let ctx = BanditContext {
            horizon: p.newcb_horizon,
            ctrs: rates(s, 2),
        };
        let seeds = RuleSeeds {
            nature: s,
            mechanism: derive_seed(s, 1),
        };
        cases.extend(sweep_cases(2, &others, &g, seeds, &ctx));
    }
    let report = check_monotonicity(
        "newcb_impressions_monotone[n=2]",
        &cases,
        |ctx: &BanditContext, bids, seeds, agent| {
            let src = BernoulliClicks {
                ctrs: ctx.ctrs.clone(),
                seed: seeds.nature,
            };
            let run = newcb_run(bids, 1.0, ctx.horizon, &src, seeds.mechanism, false)?;
            Ok(run.run.impressions[agent] as f64)
        },
        seed,
        runner,
    )?
    .observe("realizations", p.newcb_realizations)
    .observe("horizon", p.newcb_horizon)
    .observe("grid_points", p.grid_points);
    Ok(Criterion::new(
        9,
        "NewCB ex-post monotonicity",
        Some(300.0),
        vec![report],
    ))
}

pub fn ucb1_monotonicity(p: &SuiteParams, runner: &Runner) -> Result<Criterion> {
    let g = grid(p.grid_points, 0.0, 1.0);
    let seed = p.sub(11);
    let mut reports = Vec::new();
    for n in [2usize, 3] {
        let others: Vec<Vec<f64>> = if n == 2 {
            g.iter().map(|&b| vec![b]).collect()
        } else {
            g.iter()
                .flat_map(|&a| g.iter().map(move |&b| vec![a, b]))
                .collect()
        };
        let mut cases = Vec::new();
        for &t in &p.ucb_horizons {
            for r in 0..p.ucb_realizations {
                let s = derive_seed(derive_seed(seed, n as u64), r);
                let ctx = BanditContext {
                    horizon: t,
                    ctrs: rates(s, n),
                };
                cases.extend(sweep_cases(
                    n,
                    &others,
                    &g,
                    RuleSeeds {
                        nature: s,
                        mechanism: 0,
                    },
                    &ctx,
                ));
            }
        }
        let report = check_monotonicity(
            &format!("ucb1_stack_impressions_monotone[n={n}]"),
            &cases,
            |ctx: &BanditContext, bids, seeds, agent| {
                let rule = BanditRule::new(
                    BanditAlgorithm::Ucb1,
                    StackModel(ctx.ctrs.clone()),
                    ctx.horizon,
                    1.0,
                )?;
                Ok(rule.play(bids, seeds)?.impressions[agent] as f64)
            },
            seed,
            runner,
        )?
        .observe("horizons", &p.ucb_horizons)
        .observe("realizations", p.ucb_realizations);
        reports.push(report);
    }
    Ok(Criterion::new(
        10,
        "UCB1 stack-realization monotonicity",
        None,
        reports,
    ))
}

/// Pseudo-regret of NewCB on two unit bids with rates `0.5 ± δ/2`.
pub fn newcb_regret(delta: f64, horizon: u64, seeds: RuleSeeds) -> f64 {
    let ctrs = vec![0.5 + delta / 2.0, 0.5 - delta / 2.0];
    let src = BernoulliClicks {
        ctrs: ctrs.clone(),
        seed: seeds.nature,
    };
    let bids = [1.0, 1.0];
    let run = newcb_run(&bids, 1.0, horizon, &src, seeds.mechanism, false).expect("valid instance");
    regret(&run.run.choices, &bids, &ctrs, horizon, 1.0)
        .expect("valid choices")
        .regret
}

pub fn regret_envelopes(p: &SuiteParams, runner: &Runner, th: &Thresholds) -> Criterion {
    let seed = p.sub(12);
    let gaps = p.regret_gaps.clone();
    let envelope = check_regret_envelope(
        "newcb_regret_envelope[n=2]",
        2,
        gaps.len(),
        &p.regret_horizons,
        p.regret_runs,
        seed,
        |inst, t, s| newcb_regret(gaps[inst], t, s),
        runner,
        th,
    )
    .observe("gaps", &gaps);
    let growth = check_regret_growth(
        &format!("newcb_regret_growth[gap={}]", p.growth_gap),
        p.growth_horizons,
        p.regret_runs,
        derive_seed(seed, 1),
        |t, s| newcb_regret(p.growth_gap, t, s),
        runner,
    );
    Criterion::new(
        11,
        "NewCB regret envelopes",
        Some(900.0),
        vec![envelope, growth],
    )
}

/// Runs every criterion in order.
pub fn run_all(p: &SuiteParams, runner: &Runner, th: &Thresholds) -> Result<Vec<Criterion>> {
    let (c6, c12) = ex_post(p, runner)?;
    Ok(vec![
        estimator(p, runner, th),
        equivalence(p, runner, th)?,
        shrink_and_blow_up(p, runner, th)?,
        payments(p, runner, th)?,
        truthfulness(p, runner, th)?,
        c6,
        identity(p, runner, th)?,
        shortest_path(p, runner, th)?,
        newcb_monotonicity(p, runner)?,
        ucb1_monotonicity(p, runner)?,
        regret_envelopes(p, runner, th),
        c12,
    ])
}

/// Verdict and title of a criterion, naming the checks that did not pass.
pub fn criterion_verdict(c: &Criterion) -> String {
    let verdict = if c.passed() { "PASS" } else { "FAIL" };
    let failing: Vec<&str> = c
        .reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.check.as_str())
        .collect();
    let mut line = format!("{verdict}: {}", c.title);
    if !failing.is_empty() {
        line.push_str(&format!(" (not passed: {})", failing.join(", ")));
    }
    line
}

/// One line per criterion.
pub fn criterion_line(c: &Criterion) -> String {
    format!("criterion {:>2} {}", c.id, criterion_verdict(c))
}

/// Replay info attached to the suite's JSON output.
pub fn params_json(p: &SuiteParams) -> serde_json::Value {
    json!(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinned_targets() {
        assert!((shrink_target(0.5, 1.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(blow_up_target(0.25, -1.0), -1.5);
        assert_eq!(deviation_grid(&AUCTION_BIDS).len(), 20);
    }

    #[test]
    fn quick_suite_cheap_criteria_pass() {
        let p = SuiteParams::quick(3);
        let runner = Runner::with_workers(2);
        let th = Thresholds::default();
        assert!(estimator(&p, &runner, &th).passed());
        assert!(identity(&p, &runner, &th).unwrap().passed());
        let (c6, c12) = ex_post(&p, &runner).unwrap();
        assert!(c6.passed() && c12.passed());
        assert_eq!(
            c6.reports[0].observed_f64("runs").unwrap() as u64,
            p.ex_post_runs
        );
    }
}
