//! Shortest-path procurement.
//!
//! Each undirected edge is owned by one agent whose type is the negated cost of
//! using the edge. The efficient rule buys the cheapest source-target path,
//! computed by a single Dijkstra run. Ties between equal-cost paths go to the
//! lexicographically smallest sequence of agent ids along the path, which keeps
//! the rule deterministic and monotone for every fixed input.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::mechanism::{AllocationRule, RuleSeeds};
use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub agent: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    nodes: usize,
    edges: Vec<Edge>,
    source: usize,
    target: usize,
    /// Per node, indices into `edges`.
    adjacency: Vec<Vec<usize>>,
    /// `edge_of_agent[a]` is the index of agent `a`'s edge.
    edge_of_agent: Vec<usize>,
}

impl Graph {
    /// Agent ids must be exactly `0..edges.len()`.
    pub fn new(nodes: usize, edges: Vec<Edge>, source: usize, target: usize) -> Result<Self> {
        if source >= nodes || target >= nodes {
            return Err(Error::Config("source or target node out of range"));
        }
        if source == target {
            return Err(Error::Config("source and target must differ"));
        }
        let mut adjacency = vec![Vec::new(); nodes];
        let mut edge_of_agent = vec![usize::MAX; edges.len()];
        for (idx, e) in edges.iter().enumerate() {
            if e.from >= nodes || e.to >= nodes {
                return Err(Error::Config("edge endpoint out of range"));
            }
            if e.agent >= edges.len() || edge_of_agent[e.agent] != usize::MAX {
                return Err(Error::Config("agent ids must be 0..edges, each used once"));
            }
            edge_of_agent[e.agent] = idx;
            adjacency[e.from].push(idx);
            if e.to != e.from {
                adjacency[e.to].push(idx);
            }
        }
        Ok(Graph {
            nodes,
            edges,
            source,
            target,
            adjacency,
            edge_of_agent,
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn num_agents(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_of(&self, agent: usize) -> Edge {
        self.edges[self.edge_of_agent[agent]]
    }

    /// Edges incident to `node`.
    pub fn incident(&self, node: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.adjacency[node].iter().map(move |&i| &self.edges[i])
    }

    /// Whether the source reaches the target, optionally ignoring one agent's edge.
    pub fn connected_without(&self, skip_agent: Option<usize>) -> bool {
        let mut seen = vec![false; self.nodes];
        let mut queue = VecDeque::new();
        seen[self.source] = true;
        queue.push_back(self.source);
        while let Some(u) = queue.pop_front() {
            if u == self.target {
                return true;
            }
            for e in self.incident(u) {
                if Some(e.agent) == skip_agent {
                    continue;
                }
                let v = if e.from == u { e.to } else { e.from };
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        false
    }

    /// Lowest agent whose edge alone separates source and target, if any.
    pub fn cut_edge(&self) -> Option<usize> {
        if !self.connected_without(None) {
            return None;
        }
        (0..self.edges.len()).find(|&a| !self.connected_without(Some(a)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    /// Agent ids along the path from source to target.
    pub edges: Vec<usize>,
    pub total_cost: f64,
    pub dijkstra_calls: u64,
}

impl PathResult {
    pub fn allocation(&self, agents: usize) -> Vec<f64> {
        let mut a = vec![0.0; agents];
        for &e in &self.edges {
            a[e] = 1.0;
        }
        a
    }
}

#[derive(Debug, Clone)]
struct Label {
    cost: f64,
    path: Vec<usize>,
}

impl Label {
    fn cmp_key(&self, other: &Label) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then_with(|| self.path.cmp(&other.path))
    }
}

struct Entry {
    label: Label,
    node: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .label
            .cmp_key(&self.label)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Cheapest source-target path for reported cost bids `b_e = -c_e < 0`.
pub fn eff_shortest_path(graph: &Graph, cost_bids: &[f64]) -> Result<PathResult> {
    if cost_bids.len() != graph.num_agents() {
        return Err(Error::BidCount {
            expected: graph.num_agents(),
            got: cost_bids.len(),
        });
    }
    for &b in cost_bids {
        if b >= 0.0 || b.is_nan() {
            return Err(Error::OutOfSupport {
                bid: b,
                support: Interval::NEGATIVE,
            });
        }
    }
    let mut best: Vec<Option<Label>> = vec![None; graph.nodes];
    let mut settled = vec![false; graph.nodes];
    let mut heap = BinaryHeap::new();
    let start = Label {
        cost: 0.0,
        path: Vec::new(),
    };
    best[graph.source] = Some(start.clone());
    heap.push(Entry {
        label: start,
        node: graph.source,
    });
    while let Some(Entry { label, node }) = heap.pop() {
        if settled[node] {
            continue;
        }
        settled[node] = true;
        if node == graph.target {
            return Ok(PathResult {
                edges: label.path,
                total_cost: label.cost,
                dijkstra_calls: 1,
            });
        }
        for e in graph.incident(node) {
            let v = if e.from == node { e.to } else { e.from };
            if settled[v] {
                continue;
            }
            let mut path = label.path.clone();
            path.push(e.agent);
            let cand = Label {
                cost: label.cost + -cost_bids[e.agent],
                path,
            };
            let better = match &best[v] {
                None => true,
                Some(cur) => cand.cmp_key(cur) == Ordering::Less,
            };
            if better {
                best[v] = Some(cand.clone());
                heap.push(Entry {
                    label: cand,
                    node: v,
                });
            }
        }
    }
    Err(Error::Infeasible)
}

/// The efficient procurement rule, instrumented with a Dijkstra counter.
#[derive(Debug)]
pub struct EffRule {
    graph: Graph,
    dijkstra_calls: AtomicU64,
}

impl EffRule {
    /// Rejects graphs in which a single edge separates source and target.
    pub fn new(graph: Graph) -> Result<Self> {
        if let Some(agent) = graph.cut_edge() {
            return Err(Error::CutEdge(agent));
        }
        Ok(EffRule {
            graph,
            dijkstra_calls: AtomicU64::new(0),
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Total shortest-path computations performed so far.
    pub fn dijkstra_calls(&self) -> u64 {
        self.dijkstra_calls.load(AtomicOrdering::Relaxed)
    }

    pub fn shortest_path(&self, cost_bids: &[f64]) -> Result<PathResult> {
        self.dijkstra_calls.fetch_add(1, AtomicOrdering::Relaxed);
        eff_shortest_path(&self.graph, cost_bids)
    }
}

impl AllocationRule for EffRule {
    fn num_agents(&self) -> usize {
        self.graph.num_agents()
    }
    fn type_interval(&self, _agent: usize) -> Interval {
        Interval::NEGATIVE
    }
    fn evaluate(&self, bids: &[f64], _seeds: RuleSeeds) -> Result<Vec<f64>> {
        let path = self.shortest_path(bids)?;
        Ok(path.allocation(self.graph.num_agents()))
    }
}
