//! Reusable distributed building blocks.

pub mod bellman_ford;
pub mod bounded_hop;
pub mod hitting_set;
pub mod lift;

use crate::graph::{CommNetwork, WeightedDigraph, UNREACHABLE};

/// For every adjacency position `p` of node `v` (pointing at neighbour `u`),
/// the lightest edge weight `u -> v`, or [`UNREACHABLE`] when there is none.
/// This is the part of the input a node knows locally.
pub fn incoming_by_position(net: &CommNetwork, g: &WeightedDigraph) -> Vec<u64> {
    incoming_mapped(net, g, |w| w)
}

/// As [`incoming_by_position`], with each weight passed through `f` first.
pub fn incoming_mapped(net: &CommNetwork, g: &WeightedDigraph, f: impl Fn(u64) -> u64) -> Vec<u64> {
    let mut out = vec![UNREACHABLE; net.adjacency_len()];
    for e in g.edges() {
        if e.tail == e.head {
            continue;
        }
        let row = net.neighbors(e.head);
        let idx = row.binary_search(&e.tail).expect("every edge must run along a link");
        let p = net.positions(e.head).start + idx;
        out[p] = out[p].min(f(e.weight));
    }
    out
}
