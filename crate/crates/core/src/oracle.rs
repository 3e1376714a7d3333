//! Sequential reference computations used to check the distributed code.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{CommNetwork, DistanceVector, Kind, NodeId, WeightedDigraph, UNREACHABLE};

/// Exact distances from `src` by Dijkstra with a binary heap.
pub fn dijkstra(g: &WeightedDigraph, src: NodeId) -> DistanceVector {
    let mut dist = vec![UNREACHABLE; g.node_count()];
    let mut heap = BinaryHeap::new();
    dist[src] = 0;
    heap.push(Reverse((0u64, src)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in g.out_edges(u) {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    DistanceVector::new(dist, Kind::Exact)
}

/// Minimum weight over paths with at most `h` edges, by `h` synchronous sweeps.
pub fn hop_limited(g: &WeightedDigraph, src: NodeId, h: u64) -> Result<DistanceVector> {
    if h == 0 {
        return Err(Error::InvalidParameter("hop bound must be at least 1".into()));
    }
    let n = g.node_count();
    let mut cur = vec![UNREACHABLE; n];
    cur[src] = 0;
    let mut next = cur.clone();
    for _ in 0..h {
        let mut changed = false;
        for e in g.edges() {
            let du = cur[e.tail];
            if du != UNREACHABLE && du + e.weight < next[e.head] {
                next[e.head] = du + e.weight;
                changed = true;
            }
        }
        cur.copy_from_slice(&next);
        if !changed {
            break;
        }
    }
    Ok(DistanceVector::new(cur, Kind::Exact))
}

/// True iff every node is reachable from the source along directed edges.
pub fn check_reachable(g: &WeightedDigraph) -> bool {
    let mut seen = vec![false; g.node_count()];
    let mut stack = vec![g.source()];
    seen[g.source()] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &(v, _) in g.out_edges(u) {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == g.node_count()
}

/// Hop distances from `src` in the network.
pub fn bfs_hops(net: &CommNetwork, src: NodeId) -> Vec<u64> {
    let mut dist = vec![UNREACHABLE; net.node_count()];
    let mut queue = VecDeque::new();
    dist[src] = 0;
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        for &v in net.neighbors(u) {
            if dist[v] == UNREACHABLE {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

pub fn eccentricity(net: &CommNetwork, v: NodeId) -> u64 {
    bfs_hops(net, v).into_iter().max().unwrap_or(0)
}

/// Exact unweighted diameter by BFS from every node.
pub fn exact_diameter(net: &CommNetwork) -> u64 {
    (0..net.node_count()).map(|v| eccentricity(net, v)).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn path() -> WeightedDigraph {
        WeightedDigraph::new(
            3,
            vec![Edge { tail: 0, head: 1, weight: 2 }, Edge { tail: 1, head: 2, weight: 3 }],
            3,
            0,
        )
        .unwrap()
    }

    #[test]
    fn dijkstra_on_two_edge_path() {
        assert_eq!(dijkstra(&path(), 0).values, vec![0, 2, 5]);
    }

    #[test]
    fn dijkstra_single_node() {
        let g = WeightedDigraph::new(1, vec![], 0, 0).unwrap();
        assert_eq!(dijkstra(&g, 0).values, vec![0]);
    }

    #[test]
    fn hop_limit_cuts_far_node() {
        assert_eq!(hop_limited(&path(), 0, 1).unwrap().values, vec![0, 2, UNREACHABLE]);
        assert_eq!(hop_limited(&path(), 0, 2).unwrap().values, vec![0, 2, 5]);
        assert!(hop_limited(&path(), 0, 0).is_err());
    }

    #[test]
    fn reachability() {
        assert!(check_reachable(&path()));
        let g = WeightedDigraph::new(2, vec![], 0, 0).unwrap();
        assert!(!check_reachable(&g));
        let back = WeightedDigraph::new(2, vec![Edge { tail: 1, head: 0, weight: 0 }], 0, 0).unwrap();
        assert!(!check_reachable(&back));
    }

    #[test]
    fn diameter_of_path_and_star() {
        let p = CommNetwork::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(exact_diameter(&p), 4);
        let s = CommNetwork::new(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(exact_diameter(&s), 2);
        assert_eq!(eccentricity(&s, 0), 1);
    }
}
