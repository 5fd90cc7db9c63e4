use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use alloc2mech::error::exit;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_alloc2mech"));
    c.env_remove("ALLOC2MECH_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

fn out_arg(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn list_names_every_scenario_with_a_tag() {
    let o = run(&["list"]);
    assert_eq!(code(&o), exit::OK);
    let text = String::from_utf8(o.stdout).unwrap();
    for name in [
        "single-item",
        "k-unit",
        "shortest-path",
        "mab-ucb1",
        "mab-newcb",
        "verify-all",
    ] {
        assert!(text.contains(name), "{name}");
    }
    assert_eq!(text.matches("theorem:").count(), 6);

    let o = run(&["list", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 6);
    assert!(entries
        .iter()
        .all(|e| !e["theorem"].as_str().unwrap().is_empty()));
    assert!(entries.iter().all(|e| e["params"].is_array()));
}

#[test]
fn same_config_and_seed_give_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    for scenario in [
        "single-item",
        "mab-newcb",
        "mab-ucb1",
        "shortest-path",
        "k-unit",
    ] {
        let mut outs = Vec::new();
        for (k, workers) in ["1", "1", "3"].iter().enumerate() {
            let dir = out_arg(&tmp, &format!("{scenario}-{k}"));
            let o = bin()
                .env("ALLOC2MECH_WORKERS", workers)
                .args(["run", scenario, "--seed", "9", "--trials", "3000"])
                .args(if scenario.starts_with("mab") {
                    &["--set", "horizon=100"][..]
                } else {
                    &[]
                })
                .arg("--out")
                .arg(&dir)
                .output()
                .unwrap();
            assert!(
                code(&o) == exit::OK || code(&o) == exit::CHECK_FAILED,
                "{scenario}: {o:?}"
            );
            outs.push(files(&dir));
        }
        assert!(outs[0].len() >= 4, "{scenario}");
        assert_eq!(outs[0], outs[1], "{scenario}: rerun differs");
        assert_eq!(outs[0], outs[2], "{scenario}: worker count changes output");
    }
}

#[test]
fn different_seeds_differ() {
    let tmp = tempfile::tempdir().unwrap();
    let a = out_arg(&tmp, "a");
    let b = out_arg(&tmp, "b");
    for (seed, dir) in [("1", &a), ("2", &b)] {
        bin()
            .args([
                "run",
                "single-item",
                "--trials",
                "2000",
                "--seed",
                seed,
                "--out",
            ])
            .arg(dir)
            .output()
            .unwrap();
    }
    assert_ne!(
        fs::read(a.join("reports.jsonl")).unwrap(),
        fs::read(b.join("reports.jsonl")).unwrap()
    );
}

#[test]
fn overrides_win_and_effective_config_is_echoed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("exp.cfg");
    fs::write(
        &cfg,
        "# an experiment\nscenario = k-unit\nmu = 0.4\ntrials = 500\nk = 3\nbids = 1,2,3,4\n",
    )
    .unwrap();
    let dir = out_arg(&tmp, "o");
    let o = bin()
        .arg("run")
        .arg("--config")
        .arg(&cfg)
        .args(["--mu", "0.25", "--set", "k=2", "--set", "mu=0.9", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        code(&o) == exit::OK || code(&o) == exit::CHECK_FAILED,
        "{o:?}"
    );
    let echoed = fs::read_to_string(dir.join("config.txt")).unwrap();
    assert!(echoed.starts_with("# alloc2mech effective config v1\n"));
    // explicit flags beat --set, which beats the file
    assert!(echoed.contains("mu = 0.25\n"), "{echoed}");
    assert!(echoed.contains("k = 2\n"));
    assert!(echoed.contains("trials = 500\n"));
    assert!(echoed.contains("bids = 1,2,3,4\n"));
    // defaults are filled in
    assert!(echoed.contains("cap = 1\n"));
    assert!(echoed.contains("seed = 1\n"));
}

#[test]
fn outputs_are_versioned_and_machine_readable() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_arg(&tmp, "o");
    bin()
        .args([
            "run",
            "mab-newcb",
            "--trials",
            "20",
            "--set",
            "horizon=200",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    for (name, bytes) in files(&dir) {
        if name.ends_with(".csv") {
            let text = String::from_utf8(bytes).unwrap();
            let first = text.lines().next().unwrap();
            assert!(
                first.starts_with("# alloc2mech ") && first.ends_with(" v1"),
                "{name}: {first}"
            );
        }
    }
    let jsonl = fs::read_to_string(dir.join("reports.jsonl")).unwrap();
    assert!(jsonl.lines().count() >= 3);
    for line in jsonl.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["check"].is_string());
        assert!(["pass", "fail", "inconclusive"].contains(&v["status"].as_str().unwrap()));
        assert!(v["seeds"]["base"].is_u64());
    }
    assert!(fs::read_to_string(dir.join("summary.txt"))
        .unwrap()
        .contains("checks"));
}

#[test]
fn diamond_procurement_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_arg(&tmp, "o");
    let o = bin()
        .args([
            "run",
            "shortest-path",
            "--mu",
            "0.1",
            "--trials",
            "100000",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&o), exit::OK, "{}", String::from_utf8_lossy(&o.stdout));
    let summary = fs::read_to_string(dir.join("summary.txt")).unwrap();
    assert!(summary.contains("cost_ratio"));
    assert!(summary.contains("dijkstra_calls_per_run"));
    let jsonl = fs::read_to_string(dir.join("reports.jsonl")).unwrap();
    let calls = jsonl
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .find(|v| v["check"].as_str().unwrap().starts_with("dijkstra_calls"))
        .unwrap();
    assert_eq!(calls["status"], "pass");
    assert_eq!(calls["observed"]["runs_without_exactly_one_call"], 0);
}

#[test]
fn graph_file_input() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("g.txt");
    fs::write(
        &g,
        "# square with a diagonal\n0 1 0\n1 3 1\n0 2 2\n2 3 3\n1 2 4\n",
    )
    .unwrap();
    let dir = out_arg(&tmp, "o");
    let o = bin()
        .args([
            "run",
            "shortest-path",
            "--trials",
            "2000",
            "--set",
            "costs=1,1,2,2,0.5",
            "--set",
        ])
        .arg(format!("graph={}", g.display()))
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&o), exit::OK, "{}", String::from_utf8_lossy(&o.stderr));
    let echoed = fs::read_to_string(dir.join("graph.txt")).unwrap();
    assert!(echoed.contains("1 2 4"));
}

#[test]
fn failure_classes_have_distinct_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_arg(&tmp, "o");
    let dir = dir.to_str().unwrap();

    assert_eq!(
        code(&run(&["run", "no-such-scenario", "--out", dir])),
        exit::USAGE
    );
    assert_eq!(code(&run(&["run", "--out", dir])), exit::USAGE);
    assert_eq!(code(&run(&["bogus-subcommand"])), exit::USAGE);

    assert_eq!(
        code(&run(&["run", "shortest-path", "--mu", "0.6", "--out", dir])),
        exit::CONFIG
    );
    assert_eq!(
        code(&run(&["run", "single-item", "--mu", "1.5", "--out", dir])),
        exit::CONFIG
    );
    assert_eq!(
        code(&run(&[
            "run",
            "single-item",
            "--set",
            "colour=red",
            "--out",
            dir
        ])),
        exit::CONFIG
    );
    assert_eq!(
        code(&run(&[
            "run",
            "single-item",
            "--config",
            "/nonexistent/x.cfg"
        ])),
        exit::CONFIG
    );

    let missing = tmp.path().join("missing.txt");
    let o = bin()
        .args(["run", "shortest-path", "--out", dir, "--set"])
        .arg(format!("graph={}", missing.display()))
        .output()
        .unwrap();
    assert_eq!(code(&o), exit::GRAPH);
    let bad = tmp.path().join("bad.txt");
    fs::write(&bad, "0 1\n").unwrap();
    let o = bin()
        .args(["run", "shortest-path", "--out", dir, "--set"])
        .arg(format!("graph={}", bad.display()))
        .output()
        .unwrap();
    assert_eq!(code(&o), exit::GRAPH);

    // edge 3 is the only way into the target
    let cut = tmp.path().join("cut.txt");
    fs::write(&cut, "0 1 0\n1 2 1\n0 2 2\n2 3 3\n").unwrap();
    let o = bin()
        .args(["run", "shortest-path", "--set", "costs=1,1,1,1", "--out", dir, "--set"])
        .arg(format!("graph={}", cut.display()))
        .output()
        .unwrap();
    assert_eq!(code(&o), exit::GRAPH);

    let blocker = tmp.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = bin()
        .args(["run", "single-item", "--trials", "100", "--out"])
        .arg(blocker.join("sub"))
        .output()
        .unwrap();
    assert_eq!(code(&o), exit::OUTPUT);

    // too few trials to decide truthfulness
    assert_eq!(
        code(&run(&[
            "run",
            "single-item",
            "--trials",
            "200",
            "--out",
            dir
        ])),
        exit::CHECK_FAILED
    );

    let distinct: std::collections::BTreeSet<i32> = [
        exit::OK,
        exit::CHECK_FAILED,
        exit::USAGE,
        exit::CONFIG,
        exit::GRAPH,
        exit::OUTPUT,
        exit::RUNTIME,
    ]
    .into();
    assert_eq!(distinct.len(), 7);
}

#[test]
fn quick_suite_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_arg(&tmp, "o");
    let o = bin()
        .args(["verify-all", "--set", "profile=quick", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(code(&o) == exit::OK || code(&o) == exit::CHECK_FAILED);
    let criteria = fs::read_to_string(dir.join("criteria.csv")).unwrap();
    assert_eq!(criteria.lines().filter(|l| !l.starts_with('#')).count(), 13);
    let params: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.join("suite_params.json")).unwrap()).unwrap();
    assert_eq!(params["estimator_samples"], 20_000);
}
