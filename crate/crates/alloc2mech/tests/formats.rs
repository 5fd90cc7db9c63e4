use alloc2mech::config::Config;
use alloc2mech::io::{parse_graph, parse_trace, render_graph, trace_csv, Csv, Realization};
use alloc2mech_core::bandit::{ClickRealization, RoundRecord, StackRealization};
use alloc2mech_core::offline::{Edge, Graph};
use proptest::prelude::*;

fn realization() -> impl Strategy<Value = Realization> {
    (1usize..5, 1usize..12, any::<bool>()).prop_flat_map(|(n, cells, click)| {
        prop::collection::vec(0.0f64..=1.0, n * cells).prop_map(move |v| {
            if click {
                Realization::Click(ClickRealization::new(n, cells, v).unwrap())
            } else {
                Realization::Stack(StackRealization::new(n, cells, v).unwrap())
            }
        })
    })
}

proptest! {
    #[test]
    fn realization_csv_round_trip(r in realization()) {
        prop_assert_eq!(Realization::from_csv(&r.to_csv()).unwrap(), r);
    }

    #[test]
    fn realization_binary_round_trip(r in realization()) {
        let bytes = r.to_binary();
        prop_assert_eq!(&bytes[..4], b"A2MR");
        prop_assert_eq!(Realization::from_binary(&bytes).unwrap(), r);
    }

    #[test]
    fn truncated_binary_is_rejected(r in realization(), cut in 0usize..1000) {
        let bytes = r.to_binary();
        let cut = cut % bytes.len();
        prop_assert!(Realization::from_binary(&bytes[..cut]).is_err());
    }

    #[test]
    fn graph_round_trip(nodes in 2usize..12, raw in prop::collection::vec((0usize..100, 0usize..100), 1..30)) {
        let edges: Vec<Edge> = raw
            .iter()
            .enumerate()
            .map(|(agent, &(a, b))| Edge { from: a % nodes, to: b % nodes, agent })
            .collect();
        // node count comes from the largest id in the file
        let used = edges.iter().map(|e| e.from.max(e.to)).max().unwrap() + 1;
        prop_assume!(used >= 2);
        let g = Graph::new(used, edges, 0, used - 1).unwrap();
        let back = parse_graph(&render_graph(&g), 0, used - 1).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn trace_round_trip(rows in prop::collection::vec((1usize..6, 1usize..6, 0.0f64..=1.0, prop::collection::btree_set(1usize..6, 0..5)), 0..40)) {
        let trace: Vec<RoundRecord> = rows
            .into_iter()
            .enumerate()
            .map(|(k, (d, p, reward, active))| RoundRecord {
                round: k as u64 + 1,
                designated: d,
                played: p,
                reward,
                active: active.into_iter().collect(),
            })
            .collect();
        prop_assert_eq!(parse_trace(&trace_csv(&trace).render()).unwrap(), trace);
    }

    #[test]
    fn config_render_round_trip(entries in prop::collection::btree_map("[a-z_]{1,8}", "[a-z0-9.,:]{1,12}", 0..10)) {
        let mut c = Config::new();
        for (k, v) in &entries {
            c.set(k, v.as_str());
        }
        let text = c.render();
        let back = Config::parse(&text).unwrap();
        prop_assert_eq!(back.render(), text);
        for (k, v) in &entries {
            prop_assert_eq!(back.str(k).unwrap(), v.as_str());
        }
    }
}

#[test]
fn csv_header_is_versioned() {
    let mut c = Csv::new("agents", &["agent", "bid"]);
    c.row([1.to_string(), 0.5.to_string()]);
    assert_eq!(c.render(), "# alloc2mech agents v1\nagent,bid\n1,0.5\n");
}

#[test]
fn wrong_header_version_is_rejected() {
    let r = Realization::Click(ClickRealization::new(1, 1, vec![0.5]).unwrap());
    let text = r.to_csv().replacen(" v1", " v2", 1);
    assert!(Realization::from_csv(&text).is_err());
}

#[test]
fn malformed_graph_lines_are_rejected() {
    assert!(parse_graph("0 1\n", 0, 1).is_err());
    assert!(parse_graph("0 x 0\n", 0, 1).is_err());
    assert!(parse_graph("# nothing\n", 0, 1).is_err());
    assert!(
        parse_graph("0 1 0\n1 2 0\n", 0, 2).is_err(),
        "agent ids are one per edge"
    );
}

#[test]
fn config_counts_and_comments() {
    let c = Config::parse("# header\ntrials = 1e6\nruns=1_000 # inline\n\nmu = 0.25\n").unwrap();
    assert_eq!(c.u64("trials").unwrap(), 1_000_000);
    assert_eq!(c.u64("runs").unwrap(), 1_000);
    assert_eq!(c.f64("mu").unwrap(), 0.25);
    assert!(Config::parse("a = 1\na = 2\n").is_err());
    assert!(Config::parse("no equals sign\n").is_err());
    assert!(c.u64("mu").is_err());
}
