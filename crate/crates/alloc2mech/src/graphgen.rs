//! Random procurement graphs.

use alloc2mech_core::offline::{Edge, Graph};
use alloc2mech_core::seed::UniformStream;
use alloc2mech_core::Result;

/// A ring through all nodes plus `chords` random extra edges, with source 0
/// and target `nodes / 2`. The ring leaves no edge whose removal disconnects
/// the graph, so no agent is a source-target cut. Also returns costs drawn
/// uniformly from `[1, 10)`.
pub fn ring_with_chords(nodes: usize, chords: usize, seed: u64) -> Result<(Graph, Vec<f64>)> {
    let mut rng = UniformStream::new(seed);
    let mut edges: Vec<Edge> = (0..nodes)
        .map(|k| Edge {
            from: k,
            to: (k + 1) % nodes,
            agent: k,
        })
        .collect();
    while edges.len() < nodes + chords {
        let a = (rng.next_u64() % nodes as u64) as usize;
        let b = (rng.next_u64() % nodes as u64) as usize;
        if a != b {
            edges.push(Edge {
                from: a,
                to: b,
                agent: edges.len(),
            });
        }
    }
    let costs = (0..edges.len())
        .map(|_| 1.0 + 9.0 * (1.0 - rng.next_unit()))
        .collect();
    Ok((Graph::new(nodes, edges, 0, nodes / 2)?, costs))
}

/// The four-edge diamond: `0-1-3` and `0-2-3`.
pub fn diamond() -> Graph {
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
    .expect("valid diamond")
}
