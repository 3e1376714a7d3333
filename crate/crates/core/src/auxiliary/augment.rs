//! The augmented graph and the final hop-bounded Bellman-Ford.
//!
//! `G′` keeps every edge of `G` at twice its weight and adds `s → x` of
//! weight `dist_H(s, x)` for each skeleton node `x`; on overlap the smaller
//! weight wins. Each node knows its own incoming part of `G′`, so building
//! it needs no communication.

use crate::engine::RoundLedger;
use crate::error::Result;
use crate::graph::{CommNetwork, Edge, HalfDistances, NodeId, WeightedDigraph, UNREACHABLE};
use crate::primitives::bellman_ford::bellman_ford_with;
use crate::primitives::incoming_mapped;
use crate::tree::BfsTree;

/// `G′` written out explicitly, for sequential cross-checks.
pub fn explicit_augmented_graph(g: &WeightedDigraph, skeleton: &[NodeId], dist_h: &[u64]) -> WeightedDigraph {
    let s = g.source();
    let mut edges: Vec<Edge> = g.edges().iter().map(|e| Edge { weight: 2 * e.weight, ..*e }).collect();
    for (&x, &d) in skeleton.iter().zip(dist_h) {
        if x != s && d != UNREACHABLE {
            edges.push(Edge { tail: s, head: x, weight: d });
        }
    }
    WeightedDigraph::with_tight_bound(g.node_count(), edges, s).expect("same node set")
}

/// After a kickoff downcast, runs `h` rounds of Bellman-Ford on `G′`.
/// Returns `dist^h_{G′}(s, ·)`, which is `2·d̂`.
pub fn augment_and_finalize(
    net: &CommNetwork,
    tree: &BfsTree,
    g: &WeightedDigraph,
    skeleton: &[NodeId],
    dist_h: &[u64],
    h: u64,
    ledger: &mut RoundLedger,
) -> Result<HalfDistances> {
    let incoming = incoming_mapped(net, g, |w| 2 * w);
    let s = g.source();
    let seeds: Vec<(NodeId, u64)> = skeleton
        .iter()
        .zip(dist_h)
        .filter(|&(&x, &d)| x != s && d != UNREACHABLE)
        .map(|(&x, &d)| (x, d))
        .collect();
    ledger.charge("aux/final-kickoff", tree.height);
    let doubled = bellman_ford_with(net, &incoming, s, &seeds, h, ledger, "aux/final-bellman-ford")?;
    Ok(HalfDistances { doubled })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::hop_limited;
    use crate::tree::build_bfs_tree;

    #[test]
    fn trivial_skeleton_doubles_weights() {
        let edges = vec![
            Edge { tail: 0, head: 1, weight: 3 },
            Edge { tail: 1, head: 2, weight: 4 },
            Edge { tail: 0, head: 2, weight: 9 },
        ];
        let g = WeightedDigraph::new(3, edges, 9, 0).unwrap();
        let net = CommNetwork::from_digraph(&g).unwrap();
        let mut l = RoundLedger::new(3);
        let t = build_bfs_tree(&net, 0, &mut l).unwrap();
        let d = augment_and_finalize(&net, &t, &g, &[0], &[0], 2, &mut l).unwrap();
        assert_eq!(d.doubled, vec![0, 6, 14]);
    }

    #[test]
    fn skeleton_edges_shortcut_and_match_explicit_graph() {
        let edges: Vec<Edge> = (0..4).map(|i| Edge { tail: i, head: i + 1, weight: 5 }).collect();
        let g = WeightedDigraph::new(5, edges, 5, 0).unwrap();
        let net = CommNetwork::from_digraph(&g).unwrap();
        let mut l = RoundLedger::new(5);
        let t = build_bfs_tree(&net, 0, &mut l).unwrap();
        let skeleton = [0, 3];
        let dist_h = [0, 16];
        let d = augment_and_finalize(&net, &t, &g, &skeleton, &dist_h, 2, &mut l).unwrap();
        let gp = explicit_augmented_graph(&g, &skeleton, &dist_h);
        assert_eq!(d.doubled, hop_limited(&gp, 0, 2).unwrap().values);
        assert_eq!(d.doubled[3], 16);
        assert_eq!(d.doubled[4], 26);
    }
}
