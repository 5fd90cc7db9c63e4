use alloc2mech_core::offline::{eff_shortest_path, k_unit, single_item, Edge, EffRule, Graph};
use alloc2mech_core::{AllocationRule, Error, RuleSeeds};
use proptest::prelude::*;

/// Every simple source-target path as (cost summed from the source, agent ids).
fn all_paths(g: &Graph, costs: &[f64]) -> Vec<(f64, Vec<usize>)> {
    fn walk(
        g: &Graph,
        costs: &[f64],
        node: usize,
        seen: &mut Vec<bool>,
        path: &mut Vec<usize>,
        cost: f64,
        out: &mut Vec<(f64, Vec<usize>)>,
    ) {
        if node == g.target() {
            out.push((cost, path.clone()));
            return;
        }
        for e in g.incident(node) {
            let next = if e.from == node { e.to } else { e.from };
            if seen[next] {
                continue;
            }
            seen[next] = true;
            path.push(e.agent);
            walk(g, costs, next, seen, path, cost + costs[e.agent], out);
            path.pop();
            seen[next] = false;
        }
    }
    let mut out = Vec::new();
    let mut seen = vec![false; g.nodes()];
    seen[g.source()] = true;
    walk(
        g,
        costs,
        g.source(),
        &mut seen,
        &mut Vec::new(),
        0.0,
        &mut out,
    );
    out
}

/// Cheapest path, ties to the lexicographically smallest agent sequence.
fn oracle_path(g: &Graph, costs: &[f64]) -> Option<(f64, Vec<usize>)> {
    all_paths(g, costs)
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
}

fn graph_strategy(max_nodes: usize, max_edges: usize) -> impl Strategy<Value = Graph> {
    (3..=max_nodes).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n), 1..=max_edges).prop_map(move |pairs| {
            let edges = pairs
                .into_iter()
                .enumerate()
                .map(|(agent, (from, to))| Edge { from, to, agent })
                .collect();
            Graph::new(n, edges, 0, n - 1).unwrap()
        })
    })
}

fn diamond() -> Graph {
    // s=0, t=3; agents 0..4 are e1..e4.
    Graph::new(
        4,
        vec![
            Edge {
                from: 0,
                to: 1,
                agent: 0,
            },
            Edge {
                from: 0,
                to: 2,
                agent: 1,
            },
            Edge {
                from: 1,
                to: 3,
                agent: 2,
            },
            Edge {
                from: 2,
                to: 3,
                agent: 3,
            },
        ],
        0,
        3,
    )
    .unwrap()
}

#[test]
fn diamond_picks_cheaper_side() {
    let g = diamond();
    let costs = [1.0, 2.0, 2.0, 2.0];
    let bids: Vec<f64> = costs.iter().map(|c| -c).collect();
    let p = eff_shortest_path(&g, &bids).unwrap();
    assert_eq!(p.allocation(4), vec![1.0, 0.0, 1.0, 0.0]);
    assert_eq!(p.total_cost, 3.0);
    let (cost, path) = oracle_path(&g, &costs).unwrap();
    assert_eq!((cost, path), (3.0, vec![0, 2]));
    assert_eq!(all_paths(&g, &costs).len(), 2);
}

#[test]
fn diamond_rule_counts_one_call_per_evaluation() {
    let rule = EffRule::new(diamond()).unwrap();
    for k in 1..=5u64 {
        rule.evaluate(&[-1.0, -2.0, -3.0, -1.5], RuleSeeds::default())
            .unwrap();
        assert_eq!(rule.dijkstra_calls(), k);
    }
}

#[test]
fn single_item_examples() {
    assert_eq!(single_item(&[3.0, 1.0, 2.0]), vec![1.0, 0.0, 0.0]);
    assert_eq!(single_item(&[2.0, 2.0]), vec![1.0, 0.0]);
    assert_eq!(single_item(&[2.0, 5.0]), vec![0.0, 1.0]);
}

#[test]
fn k_unit_examples() {
    assert_eq!(k_unit(&[3.0, 1.0, 2.0], 2, 1).unwrap(), vec![1.0, 0.0, 1.0]);
    assert_eq!(k_unit(&[3.0, 1.0, 2.0], 2, 2).unwrap(), vec![2.0, 0.0, 0.0]);
    assert!(matches!(k_unit(&[3.0, 1.0], 5, 2), Err(Error::Config(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn dijkstra_matches_enumeration_with_ties(
        g in graph_strategy(6, 10),
        raw in prop::collection::vec(1u8..4, 10),
    ) {
        // small integer costs force many exact ties
        let costs: Vec<f64> = raw[..g.num_agents()].iter().map(|&c| c as f64).collect();
        let bids: Vec<f64> = costs.iter().map(|c| -c).collect();
        match (oracle_path(&g, &costs), eff_shortest_path(&g, &bids)) {
            (None, r) => prop_assert_eq!(r, Err(Error::Infeasible)),
            (Some((cost, path)), Ok(p)) => {
                prop_assert_eq!(p.total_cost, cost);
                prop_assert_eq!(p.edges, path);
            }
            (Some(_), Err(e)) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn dijkstra_matches_enumeration_real_costs(
        g in graph_strategy(7, 10),
        costs in prop::collection::vec(0.01f64..10.0, 10),
    ) {
        let costs = &costs[..g.num_agents()];
        let bids: Vec<f64> = costs.iter().map(|c| -c).collect();
        if let Some((cost, path)) = oracle_path(&g, costs) {
            let p = eff_shortest_path(&g, &bids).unwrap();
            prop_assert_eq!(p.total_cost, cost);
            prop_assert_eq!(p.edges, path);
        }
    }

    #[test]
    fn eff_is_monotone_in_own_bid(
        g in graph_strategy(5, 6),
        raw in prop::collection::vec(1u8..5, 6),
        agent in 0usize..6,
    ) {
        prop_assume!(g.connected_without(None));
        let agent = agent % g.num_agents();
        let mut bids: Vec<f64> = raw[..g.num_agents()].iter().map(|&c| -(c as f64)).collect();
        let mut last = 0.0;
        // bid rises from -6 to -0.25, i.e. the edge gets cheaper
        for step in 0..24 {
            bids[agent] = -6.0 + 0.25 * step as f64;
            let costs: Vec<f64> = bids.iter().map(|b| -b).collect();
            let a = eff_shortest_path(&g, &bids).unwrap().allocation(g.num_agents());
            let (_, path) = oracle_path(&g, &costs).unwrap();
            prop_assert_eq!(a[agent] == 1.0, path.contains(&agent));
            prop_assert!(a[agent] >= last, "allocation dropped at bid {}", bids[agent]);
            last = a[agent];
        }
    }

    #[test]
    fn single_item_monotone_and_feasible(
        bids in prop::collection::vec(0.0f64..10.0, 1..6),
        agent in 0usize..6,
        raise in 0.0f64..5.0,
    ) {
        let agent = agent % bids.len();
        let a = single_item(&bids);
        prop_assert_eq!(a.iter().sum::<f64>(), 1.0);
        let mut up = bids.clone();
        up[agent] += raise;
        prop_assert!(single_item(&up)[agent] >= a[agent]);
    }

    #[test]
    fn k_unit_monotone_and_exhausts_supply(
        bids in prop::collection::vec(0.0f64..10.0, 1..6),
        k in 1usize..8,
        cap in 1usize..3,
        agent in 0usize..6,
        raise in 0.0f64..5.0,
    ) {
        prop_assume!(k <= cap * bids.len());
        let agent = agent % bids.len();
        let a = k_unit(&bids, k, cap).unwrap();
        prop_assert_eq!(a.iter().sum::<f64>(), k as f64);
        prop_assert!(a.iter().all(|&u| u <= cap as f64));
        let mut up = bids.clone();
        up[agent] += raise;
        prop_assert!(k_unit(&up, k, cap).unwrap()[agent] >= a[agent]);
    }
}
