//! Runnable experiments behind `alloc2mech run`.
//!
//! A scenario validates its config against its schema, then runs the
//! transformed mechanism with the checks that apply and returns reports plus
//! the files to write. Nothing in the output depends on the worker count or the output
//! directory, so the same config and seed give byte-identical files.

use crate::checks::{
    check_identity_probability, check_single_call, check_truthfulness, check_welfare_factor,
    compare_estimate, ex_post_tally, mc_settlement, CheckReport, Status, Thresholds, TypeSign,
};
use crate::config::{Config, Kind, Param};
use crate::error::{Error, Result};
use crate::graphgen::diamond;
use crate::io::{emit, reports_jsonl, summary_table, trace_csv, Csv, Realization};
use crate::oracle::transformed_payment;
use crate::rewards::BetaModel;
use crate::stats::{Runner, Welford};
use crate::suite::{self, deviation_grid, Criterion, SuiteParams};
use alloc2mech_core::bandit::{
    newcb_run, regret, BanditAlgorithm, BanditRule, ClickModel, ClickRealization, RewardModel,
    RewardSource, StackModel, StackRealization,
};
use alloc2mech_core::offline::{eff_shortest_path, EffRule, Graph, KUnit, SingleItem};
use alloc2mech_core::quadrature::QuadratureConfig;
use alloc2mech_core::resampling::{AnyResampler, Canonical};
use alloc2mech_core::seed::{derive_seed, UniformStream};
use alloc2mech_core::{alloc_to_mech, AllocationRule, Mechanism, RunSeeds};
use serde::Serialize;
use serde_json::json;
use std::path::Path;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Scenario {
    pub name: &'static str,
    /// The result the scenario exercises.
    pub theorem: &'static str,
    pub description: &'static str,
    pub params: &'static [Param],
}

const MU: Param = Param::new(
    "mu",
    Kind::Float,
    Some("0.1"),
    "resampling probability in (0, 1)",
);

const SINGLE_ITEM: &[Param] = &[
    Param::new(
        "mu",
        Kind::Float,
        Some("0.2"),
        "resampling probability in (0, 1)",
    ),
    Param::new(
        "bids",
        Kind::Text,
        Some("0.5,0.7,0.9"),
        "true values, or uniform:N:LO:HI to draw N of them",
    ),
    Param::new("trials", Kind::Int, Some("100000"), "Monte Carlo runs"),
];

const K_UNIT: &[Param] = &[
    Param::new(
        "mu",
        Kind::Float,
        Some("0.2"),
        "resampling probability in (0, 1)",
    ),
    Param::new(
        "bids",
        Kind::Text,
        Some("1,4,2.5,3,0.5"),
        "true values, or uniform:N:LO:HI",
    ),
    Param::new("k", Kind::Int, Some("2"), "units for sale"),
    Param::new("cap", Kind::Int, Some("1"), "units one agent may take"),
    Param::new("trials", Kind::Int, Some("100000"), "Monte Carlo runs"),
];

const SHORTEST_PATH: &[Param] = &[
    MU,
    Param::new(
        "graph",
        Kind::Text,
        Some("diamond"),
        "edge-list file (`from to agent_id` per line) or `diamond`",
    ),
    Param::new("source", Kind::Int, Some("0"), "source node"),
    Param::new(
        "target",
        Kind::Text,
        Some("last"),
        "target node, `last` for the largest node id",
    ),
    Param::new(
        "costs",
        Kind::Text,
        Some("1,2,2,2"),
        "edge costs (> 0) by agent id, or uniform:LO:HI",
    ),
    Param::new("trials", Kind::Int, Some("100000"), "Monte Carlo runs"),
];

const BANDIT: &[Param] = &[
    MU,
    Param::new(
        "bids",
        Kind::FloatList,
        Some("1,0.8,0.6"),
        "true per-click values in [0, b_max]",
    ),
    Param::new(
        "ctrs",
        Kind::FloatList,
        Some("0.5,0.6,0.7"),
        "mean click reward per agent",
    ),
    Param::new("b_max", Kind::Float, Some("1"), "largest admissible bid"),
    Param::new("horizon", Kind::Int, Some("1000"), "rounds T"),
    Param::new("trials", Kind::Int, Some("200"), "independent runs"),
    Param::new("reward", Kind::Text, Some("bernoulli"), "bernoulli or beta"),
    Param::new(
        "concentration",
        Kind::Float,
        Some("4"),
        "beta concentration a + b",
    ),
];

const VERIFY_ALL: &[Param] = &[Param::new(
    "profile",
    Kind::Text,
    Some("full"),
    "full (acceptance sizes) or quick (smoke sizes)",
)];

pub const CATALOG: &[Scenario] = &[
    Scenario {
        name: "single-item",
        theorem: "single-call reduction: truthfulness in expectation, ex-post IR, identity probability, rebate bound; positive-type welfare factor",
        description: "transformed highest-bid auction; payments checked against the Myerson oracle",
        params: SINGLE_ITEM,
    },
    Scenario {
        name: "k-unit",
        theorem: "single-call reduction; positive-type welfare factor",
        description: "transformed greedy k-unit auction with per-agent caps",
        params: K_UNIT,
    },
    Scenario {
        name: "shortest-path",
        theorem: "shortest-path procurement: one Dijkstra call, cost within 1 + mu/(1-2mu) of optimal",
        description: "transformed cheapest-path procurement with h-canonical cost resampling",
        params: SHORTEST_PATH,
    },
    Scenario {
        name: "mab-ucb1",
        theorem: "stack-realization monotonicity of the UCB1-induced rule; single-call reduction for bandits",
        description: "transformed UCB1-induced rule on stack-indexed click rewards",
        params: BANDIT,
    },
    Scenario {
        name: "mab-newcb",
        theorem: "NewCB truthful bandit mechanism: regret envelope and welfare gap mu n b_max",
        description: "transformed NewCB on round-indexed click rewards",
        params: BANDIT,
    },
    Scenario {
        name: "verify-all",
        theorem: "all checkable claims: the twelve acceptance criteria",
        description: "runs the acceptance suite and reports one verdict per criterion",
        params: VERIFY_ALL,
    },
];

pub fn find(name: &str) -> Result<&'static Scenario> {
    CATALOG
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScenario(name.to_owned()))
}

/// Human-readable catalog.
pub fn catalog_text() -> String {
    let mut s = String::new();
    for sc in CATALOG {
        s.push_str(&format!(
            "{}\n  theorem: {}\n  {}\n",
            sc.name, sc.theorem, sc.description
        ));
        for p in sc.params {
            let d = p
                .default
                .map_or("required".to_owned(), |d| format!("default {d}"));
            s.push_str(&format!(
                "    {:<14} {:<10} {} ({d})\n",
                p.key,
                format!("{:?}", p.kind).to_lowercase(),
                p.help
            ));
        }
    }
    s
}

pub fn catalog_json() -> String {
    serde_json::to_string_pretty(CATALOG).expect("catalog serializes") + "\n"
}

/// Everything a run produces.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub reports: Vec<CheckReport>,
    /// Extra summary lines, in order.
    pub notes: Vec<(String, String)>,
    /// Scenario-specific files.
    pub files: Vec<(String, Vec<u8>)>,
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(CheckReport::passed)
    }

    fn note(&mut self, k: &str, v: impl ToString) {
        self.notes.push((k.to_owned(), v.to_string()));
    }

    fn file(&mut self, name: &str, contents: impl Into<Vec<u8>>) {
        self.files.push((name.to_owned(), contents.into()));
    }
}

/// Validates the config in place (filling defaults) and runs its scenario.
pub fn run(cfg: &mut Config, runner: &Runner, th: &Thresholds) -> Result<RunOutput> {
    let name = cfg.str("scenario")?.to_owned();
    let sc = find(&name)?;
    cfg.validate(sc.params)?;
    if cfg.contains("mu") {
        let mu = cfg.f64("mu")?;
        let negative = name == "shortest-path";
        if !(mu > 0.0 && mu < 1.0) || (negative && mu >= 0.5) {
            return Err(Error::InvalidMu(mu));
        }
    }
    let seed = cfg.u64("seed")?;
    match name.as_str() {
        "single-item" => single_item(cfg, seed, runner, th),
        "k-unit" => k_unit(cfg, seed, runner, th),
        "shortest-path" => shortest_path(cfg, seed, runner, th),
        "mab-ucb1" | "mab-newcb" => bandit(cfg, &name, seed, runner),
        "verify-all" => verify_all(cfg, seed, runner, th),
        _ => unreachable!("catalog and dispatch agree"),
    }
}

/// Writes reports, summary, effective config and scenario files into `dir`.
pub fn write_outputs(dir: &Path, cfg: &Config, title: &str, out: &RunOutput) -> Result<()> {
    crate::io::create_dir(dir)?;
    emit(dir, "config.txt", cfg.render_for_provenance())?;
    emit(dir, "reports.jsonl", reports_jsonl(&out.reports))?;
    emit(
        dir,
        "summary.txt",
        summary_table(title, &out.reports, &out.notes),
    )?;
    for (name, bytes) in &out.files {
        emit(dir, name, bytes)?;
    }
    Ok(())
}

/// A list of values, or `uniform:N:LO:HI` drawn from the run seed.
fn value_list(cfg: &Config, key: &str, seed: u64) -> Result<Vec<f64>> {
    let raw = cfg.str(key)?;
    if let Some(spec) = raw.strip_prefix("uniform:") {
        let f: Vec<&str> = spec.split(':').collect();
        let bad = || Error::config(format!("{key}: expected uniform:N:LO:HI, got {raw:?}"));
        if f.len() != 3 {
            return Err(bad());
        }
        let n: usize = f[0].parse().map_err(|_| bad())?;
        let lo: f64 = f[1].parse().map_err(|_| bad())?;
        let hi: f64 = f[2].parse().map_err(|_| bad())?;
        if n == 0 || !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(bad());
        }
        let mut rng = UniformStream::new(derive_seed(seed, 0xB1D5));
        return Ok((0..n)
            .map(|_| lo + (hi - lo) * (1.0 - rng.next_unit()))
            .collect());
    }
    cfg.f64_list(key)
}

fn positive_bids(cfg: &Config, seed: u64) -> Result<Vec<f64>> {
    let bids = value_list(cfg, "bids", seed)?;
    if bids.iter().any(|&b| b < 0.0) {
        return Err(Error::config("bids must be nonnegative"));
    }
    Ok(bids)
}

/// Checks shared by the positive-type offline scenarios.
#[allow(clippy::too_many_arguments)]
fn positive_checks<R>(
    mech: &Mechanism<R, Canonical>,
    bids: &[f64],
    trials: u64,
    seed: u64,
    runner: &Runner,
    th: &Thresholds,
    out: &mut RunOutput,
    scenario: &str,
) -> Result<()>
where
    R: AllocationRule + Sync,
{
    let mu = mech.mu();
    let tally = ex_post_tally(
        scenario,
        mech,
        bids,
        Some(mu),
        trials,
        derive_seed(seed, 1),
        runner,
    )?;
    out.reports.push(tally.ex_post_report(seed));
    out.reports.push(tally.rebate_report(seed));
    out.reports.push(check_identity_probability(
        mech,
        bids,
        trials,
        derive_seed(seed, 2),
        runner,
        th,
    )?);
    out.reports.push(check_welfare_factor(
        mech,
        bids,
        TypeSign::Positive,
        trials,
        derive_seed(seed, 3),
        runner,
        th,
    )?);
    let devs = deviation_grid(bids);
    for i in 0..bids.len() {
        out.reports.push(check_truthfulness(
            &format!("truthful[agent={}]", i + 1),
            mech,
            bids,
            i,
            &devs,
            trials,
            derive_seed(seed, 4),
            runner,
            th,
        )?);
    }
    Ok(())
}

fn single_item(cfg: &Config, seed: u64, runner: &Runner, th: &Thresholds) -> Result<RunOutput> {
    let mu = cfg.f64("mu")?;
    let trials = cfg.u64("trials")?;
    let bids = positive_bids(cfg, seed)?;
    let n = bids.len();
    let mech = alloc_to_mech(SingleItem::new(n), mu, vec![Canonical::default(); n])?;
    let mut out = RunOutput::default();
    let (alloc, charge) = mc_settlement(&mech, &bids, trials, derive_seed(seed, 5), runner)?;
    let cfgq = QuadratureConfig::default();
    let mut csv = Csv::new(
        "single-item-agents",
        &[
            "agent",
            "bid",
            "mean_allocation",
            "allocation_stderr",
            "mean_charge",
            "charge_stderr",
            "myerson_payment",
        ],
    );
    for i in 0..n {
        let oracle = transformed_payment(&bids, i, mu, &cfgq)?;
        out.reports.push(
            compare_estimate(
                &format!("payment_vs_myerson[agent={}]", i + 1),
                &charge[i],
                oracle,
                seed,
                th,
            )
            .observe("bid", bids[i]),
        );
        csv.row([
            (i + 1).to_string(),
            bids[i].to_string(),
            alloc[i].mean.to_string(),
            alloc[i].stderr.to_string(),
            charge[i].mean.to_string(),
            charge[i].stderr.to_string(),
            oracle.to_string(),
        ]);
    }
    positive_checks(
        &mech,
        &bids,
        trials,
        seed,
        runner,
        th,
        &mut out,
        "single-item",
    )?;
    out.note("agents", n);
    out.note("mu", mu);
    out.note("trials", trials);
    out.file("agents.csv", csv.render());
    Ok(out)
}

fn k_unit(cfg: &Config, seed: u64, runner: &Runner, th: &Thresholds) -> Result<RunOutput> {
    let mu = cfg.f64("mu")?;
    let trials = cfg.u64("trials")?;
    let bids = positive_bids(cfg, seed)?;
    let n = bids.len();
    let rule = KUnit::new(n, cfg.usize("k")?, cfg.usize("cap")?)?;
    let mech = alloc_to_mech(rule, mu, vec![Canonical::default(); n])?;
    let mut out = RunOutput::default();
    let (alloc, charge) = mc_settlement(&mech, &bids, trials, derive_seed(seed, 5), runner)?;
    let mut csv = Csv::new(
        "k-unit-agents",
        &[
            "agent",
            "bid",
            "mean_allocation",
            "allocation_stderr",
            "mean_charge",
            "charge_stderr",
        ],
    );
    for i in 0..n {
        csv.row([
            (i + 1).to_string(),
            bids[i].to_string(),
            alloc[i].mean.to_string(),
            alloc[i].stderr.to_string(),
            charge[i].mean.to_string(),
            charge[i].stderr.to_string(),
        ]);
    }
    positive_checks(&mech, &bids, trials, seed, runner, th, &mut out, "k-unit")?;
    out.note("agents", n);
    out.note("mu", mu);
    out.note("trials", trials);
    out.file("agents.csv", csv.render());
    Ok(out)
}

fn load_graph(cfg: &Config) -> Result<Graph> {
    let source = cfg.usize("source")?;
    let target = cfg.str("target")?;
    let spec = cfg.str("graph")?;
    let path = Path::new(spec);
    let bad = |reason: String| Error::Graph {
        path: path.to_owned(),
        reason,
    };
    let (edges, nodes) = if spec == "diamond" {
        let g = diamond();
        (g.edges().to_vec(), g.nodes())
    } else {
        let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
        crate::io::parse_edges(&text).map_err(bad)?
    };
    let t = if target == "last" {
        nodes - 1
    } else {
        parse_target(target)?
    };
    Graph::new(nodes, edges, source, t).map_err(|e| bad(e.to_string()))
}

fn parse_target(t: &str) -> Result<usize> {
    t.parse()
        .map_err(|_| Error::config(format!("target: {t:?} is not a node id")))
}

fn shortest_path(cfg: &Config, seed: u64, runner: &Runner, th: &Thresholds) -> Result<RunOutput> {
    let mu = cfg.f64("mu")?;
    let trials = cfg.u64("trials")?;
    let graph = load_graph(cfg)?;
    let m = graph.num_agents();
    let costs = match cfg.str("costs")?.strip_prefix("uniform:") {
        Some(spec) => {
            let (lo, hi) = spec
                .split_once(':')
                .and_then(|(a, b)| Some((a.parse::<f64>().ok()?, b.parse::<f64>().ok()?)))
                .ok_or_else(|| Error::config("costs: expected uniform:LO:HI"))?;
            let mut rng = UniformStream::new(derive_seed(seed, 0xC057));
            (0..m)
                .map(|_| lo + (hi - lo) * (1.0 - rng.next_unit()))
                .collect()
        }
        None => cfg.f64_list("costs")?,
    };
    if costs.len() != m {
        return Err(Error::config(format!(
            "costs: graph has {m} edges but {} costs were given",
            costs.len()
        )));
    }
    if costs.iter().any(|&c| !c.is_finite() || c <= 0.0) {
        return Err(Error::config("costs must be positive"));
    }
    let bids: Vec<f64> = costs.iter().map(|c| -c).collect();
    let optimal = eff_shortest_path(&graph, &bids)?;
    let rendered_graph = crate::io::render_graph(&graph);
    let mech = alloc_to_mech(
        EffRule::new(graph)?,
        mu,
        vec![AnyResampler::negative_sqrt(); m],
    )?;
    let mut out = RunOutput::default();
    let cost = check_welfare_factor(
        &mech,
        &bids,
        TypeSign::Negative,
        trials,
        derive_seed(seed, 3),
        runner,
        th,
    )?;
    let ratio = cost.observed_f64("ratio").unwrap_or(f64::NAN);
    out.reports.push(cost);
    out.reports.push(check_single_call(
        "dijkstra_calls",
        &mech,
        &bids,
        trials,
        derive_seed(seed, 6),
        || mech.rule().dijkstra_calls(),
    )?);
    let tally = ex_post_tally(
        "shortest-path",
        &mech,
        &bids,
        None,
        trials,
        derive_seed(seed, 1),
        runner,
    )?;
    out.reports.push(tally.ex_post_report(seed));
    out.reports.push(check_identity_probability(
        &mech,
        &bids,
        trials,
        derive_seed(seed, 2),
        runner,
        th,
    )?);
    let (alloc, charge) = mc_settlement(&mech, &bids, trials, derive_seed(seed, 5), runner)?;
    let on_path = optimal.allocation(m);
    let mut csv = Csv::new(
        "shortest-path-edges",
        &[
            "agent",
            "cost",
            "on_shortest_path",
            "mean_allocation",
            "mean_payment_received",
            "payment_stderr",
        ],
    );
    for i in 0..m {
        csv.row([
            i.to_string(),
            costs[i].to_string(),
            (on_path[i] as u8).to_string(),
            alloc[i].mean.to_string(),
            (-charge[i].mean).to_string(),
            charge[i].stderr.to_string(),
        ]);
    }
    let calls_ok = out.reports[1].status == Status::Pass;
    out.note("edges", m);
    out.note("mu", mu);
    out.note("trials", trials);
    out.note("shortest_path_cost", optimal.total_cost);
    out.note("cost_ratio", ratio);
    out.note("cost_ratio_bound", 1.0 + mu / (1.0 - 2.0 * mu));
    out.note(
        "dijkstra_calls_per_run",
        if calls_ok {
            "1 on every run".to_owned()
        } else {
            "VIOLATED".to_owned()
        },
    );
    out.file("edges.csv", csv.render());
    out.file("graph.txt", rendered_graph);
    Ok(out)
}

fn bandit(cfg: &Config, name: &str, seed: u64, runner: &Runner) -> Result<RunOutput> {
    let mu = cfg.f64("mu")?;
    let bids = cfg.f64_list("bids")?;
    let ctrs = cfg.f64_list("ctrs")?;
    let b_max = cfg.f64("b_max")?;
    let horizon = cfg.u64("horizon")?;
    let trials = cfg.u64("trials")?;
    if bids.len() != ctrs.len() {
        return Err(Error::config("bids and ctrs must have the same length"));
    }
    let algorithm = if name == "mab-newcb" {
        BanditAlgorithm::NewCb
    } else {
        BanditAlgorithm::Ucb1
    };
    match (cfg.str("reward")?, algorithm) {
        ("bernoulli", BanditAlgorithm::NewCb) => {
            let rule = BanditRule::new(algorithm, ClickModel(ctrs.clone()), horizon, b_max)?;
            bandit_with(rule, &bids, &ctrs, mu, trials, seed, false, runner)
        }
        ("bernoulli", BanditAlgorithm::Ucb1) => {
            let rule = BanditRule::new(algorithm, StackModel(ctrs.clone()), horizon, b_max)?;
            bandit_with(rule, &bids, &ctrs, mu, trials, seed, true, runner)
        }
        ("beta", _) => {
            let model =
                BetaModel::new(ctrs.clone(), cfg.f64("concentration")?).map_err(Error::Config)?;
            let rule = BanditRule::new(algorithm, model, horizon, b_max)?;
            bandit_with(rule, &bids, &ctrs, mu, trials, seed, false, runner)
        }
        (r, _) => Err(Error::config(format!(
            "reward: expected bernoulli or beta, got {r:?}"
        ))),
    }
}

/// Materializes the reward table a run sees, for replay.
fn realize_table<S: RewardSource>(src: &S, horizon: u64, stack: bool) -> Result<Realization> {
    let n = src.num_agents();
    let mut values = Vec::with_capacity(n * horizon as usize);
    for i in 0..n {
        for t in 1..=horizon {
            values.push(if stack {
                src.reward(i, 0, t)
            } else {
                src.reward(i, t, 0)
            });
        }
    }
    Ok(if stack {
        Realization::Stack(StackRealization::new(n, horizon as usize, values)?)
    } else {
        Realization::Click(ClickRealization::new(n, horizon as usize, values)?)
    })
}

#[allow(clippy::too_many_arguments)]
fn bandit_with<M>(
    rule: BanditRule<M>,
    bids: &[f64],
    ctrs: &[f64],
    mu: f64,
    trials: u64,
    seed: u64,
    stack: bool,
    runner: &Runner,
) -> Result<RunOutput>
where
    M: RewardModel + Sync,
{
    let n = bids.len();
    let (horizon, b_max) = (rule.horizon, rule.b_max);
    let algorithm = rule.algorithm;
    let mech = alloc_to_mech(&rule, mu, vec![Canonical::default(); n])?;
    let mut out = RunOutput::default();
    let tally = ex_post_tally(
        "bandit",
        &mech,
        bids,
        Some(mu),
        trials,
        derive_seed(seed, 1),
        runner,
    )?;
    out.reports.push(tally.ex_post_report(seed));
    out.reports.push(tally.rebate_report(seed));
    out.reports.push(check_identity_probability(
        &mech,
        bids,
        trials.max(2),
        derive_seed(seed, 2),
        runner,
        &Thresholds::default(),
    )?);

    // per run: welfare and regret of the algorithm on true bids and of the mechanism
    let welfare = |clicks: &[f64]| -> f64 { bids.iter().zip(clicks).map(|(b, c)| b * c).sum() };
    let run_seed = derive_seed(seed, 7);
    let rows: Vec<Result<[f64; 4]>> = runner.map(&(0..trials).collect::<Vec<u64>>(), |&t| {
        let s = RunSeeds::for_trial(run_seed, t);
        let alg = rule.play(bids, s.rule_seeds())?;
        let o = mech.run(bids, &s)?;
        let pairs: Vec<f64> = o.resample_pairs.iter().map(|p| p.x).collect();
        let mech_run = rule.play(&pairs, s.rule_seeds())?;
        let r_alg = regret(&alg.choices, bids, ctrs, horizon, b_max)?.regret;
        let r_mech = regret(&mech_run.choices, bids, ctrs, horizon, b_max)?.regret;
        Ok([welfare(&alg.clicks), welfare(&o.allocation), r_alg, r_mech])
    });
    let mut csv = Csv::new(
        "bandit-runs",
        &[
            "run",
            "welfare_algorithm",
            "welfare_mechanism",
            "regret_algorithm",
            "regret_mechanism",
        ],
    );
    let mut acc = [Welford::new(); 5];
    for (t, row) in rows.into_iter().enumerate() {
        let r = row?;
        csv.row([
            t.to_string(),
            r[0].to_string(),
            r[1].to_string(),
            r[2].to_string(),
            r[3].to_string(),
        ]);
        for k in 0..4 {
            acc[k].push(r[k]);
        }
        acc[4].push(r[0] - r[1]);
    }
    let gap = acc[4].estimate();
    let th = Thresholds::default();
    for (label, bound) in [
        ("total", mu * n as f64 * b_max),
        ("per_round", mu * n as f64 * b_max * horizon as f64),
    ] {
        out.reports.push(
            CheckReport::new(format!("welfare_gap[{label}]"), run_seed)
                .observe("mean_gap", gap.mean)
                .observe("gap_stderr", gap.stderr)
                .observe("runs", gap.trials)
                .observe("bound", bound)
                .threshold("sigma", th.sigma)
                .status(Status::from_bool(gap.mean <= bound + th.sigma * gap.stderr)),
        );
    }

    // replay material for the first run
    let s0 = RunSeeds::for_trial(run_seed, 0);
    let table = realize_table(&rule.model.realize(s0.nature), horizon, stack)?;
    out.file("realization.csv", table.to_csv());
    out.file("realization.bin", table.to_binary());
    let o0 = mech.run(bids, &s0)?;
    let x0: Vec<f64> = o0.resample_pairs.iter().map(|p| p.x).collect();
    match algorithm {
        BanditAlgorithm::NewCb => {
            let src = rule.model.realize(s0.nature);
            let traced = newcb_run(&x0, b_max, horizon, &src, s0.mechanism, true)?;
            out.file("trace.csv", trace_csv(&traced.trace).render());
        }
        BanditAlgorithm::Ucb1 => {
            let run = rule.play(&x0, s0.rule_seeds())?;
            let mut rounds = Csv::new("rounds", &["round", "played", "reward"]);
            for (k, (c, r)) in run.choices.iter().zip(&run.rewards).enumerate() {
                rounds.row([(k + 1).to_string(), (c + 1).to_string(), r.to_string()]);
            }
            out.file("rounds.csv", rounds.render());
        }
    }
    let mut agents = Csv::new(
        "bandit-agents",
        &[
            "agent",
            "bid",
            "ctr",
            "resampled_bid_run0",
            "allocation_run0",
            "charge_run0",
        ],
    );
    for i in 0..n {
        agents.row([
            (i + 1).to_string(),
            bids[i].to_string(),
            ctrs[i].to_string(),
            x0[i].to_string(),
            o0.allocation[i].to_string(),
            o0.charge[i].to_string(),
        ]);
    }
    out.file("agents.csv", agents.render());
    out.file("runs.csv", csv.render());
    out.note("agents", n);
    out.note("horizon", horizon);
    out.note("mu", mu);
    out.note("runs", trials);
    out.note("mean_regret_algorithm", acc[2].mean());
    out.note("mean_regret_mechanism", acc[3].mean());
    out.note("mean_welfare_gap", gap.mean);
    Ok(out)
}

fn verify_all(cfg: &Config, seed: u64, runner: &Runner, th: &Thresholds) -> Result<RunOutput> {
    let params = match cfg.str("profile")? {
        "full" => SuiteParams::full(seed),
        "quick" => SuiteParams::quick(seed),
        p => {
            return Err(Error::config(format!(
                "profile: expected full or quick, got {p:?}"
            )))
        }
    };
    let criteria = suite::run_all(&params, runner, th)?;
    Ok(suite_output(&criteria, &params))
}

pub fn suite_output(criteria: &[Criterion], params: &SuiteParams) -> RunOutput {
    let mut out = RunOutput::default();
    let mut csv = Csv::new("criteria", &["criterion", "status", "title", "checks"]);
    for c in criteria {
        csv.row([
            c.id.to_string(),
            if c.passed() { "pass" } else { "fail" }.to_owned(),
            c.title.replace(',', ";"),
            c.reports.len().to_string(),
        ]);
        out.notes.push((
            format!("criterion {:>2}", c.id),
            suite::criterion_verdict(c),
        ));
        out.reports.extend(c.reports.iter().cloned());
    }
    out.file("criteria.csv", csv.render());
    out.file(
        "suite_params.json",
        serde_json::to_string_pretty(&json!(params)).expect("params serialize") + "\n",
    );
    out
}
