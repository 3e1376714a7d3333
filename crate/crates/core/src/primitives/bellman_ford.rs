//! Synchronous Bellman-Ford over broadcast rounds.
//!
//! In round `r` a node announces a value realised by a path of at most
//! `r - 1` edges, and only if that value improved since its last
//! announcement. After `h` rounds every node holds its `h`-hop distance.

use crate::engine::{run_synchronous, Ctx, NodeProgram, RoundLedger, Stop, Word};
use crate::error::{Error, Result};
use crate::graph::{CommNetwork, DistanceVector, Kind, NodeId, WeightedDigraph, UNREACHABLE};
use crate::primitives::incoming_by_position;
use crate::tree::PIPE_SLACK;

struct BfNode<'a> {
    incoming: &'a [u64],
    dist: u64,
    sent: u64,
    /// First round in which the initial value may be announced.
    start: u64,
    h: u64,
}

impl NodeProgram for BfNode<'_> {
    fn init(&mut self, ctx: &mut Ctx) {
        if self.dist != UNREACHABLE && self.start <= self.h {
            ctx.wake(self.start, 0);
        }
    }

    fn on_round(&mut self, ctx: &mut Ctx) -> Option<Word> {
        if self.dist < self.sent {
            self.sent = self.dist;
            Some(Word::new(ctx.node(), self.dist, 0))
        } else {
            None
        }
    }

    fn on_receive(&mut self, pos: usize, _from: NodeId, w: &Word, ctx: &mut Ctx) {
        let wt = self.incoming[pos];
        if wt == UNREACHABLE {
            return;
        }
        let cand = w.value + wt;
        if cand < self.dist {
            let was_pending = self.dist < self.sent;
            self.dist = cand;
            let next = ctx.round() + 1;
            if !was_pending && next <= self.h {
                ctx.wake(next, 0);
            }
        }
    }
}

/// `h` rounds of Bellman-Ford from `src` over edge weights given per
/// adjacency position. `seeds` are one-hop values some nodes know before the
/// first round, announced from round 2 on.
pub fn bellman_ford_with(
    net: &CommNetwork,
    incoming: &[u64],
    src: NodeId,
    seeds: &[(NodeId, u64)],
    h: u64,
    ledger: &mut RoundLedger,
    phase: &str,
) -> Result<Vec<u64>> {
    if h == 0 {
        return Err(Error::InvalidParameter("hop bound must be at least 1".into()));
    }
    let n = net.node_count();
    let mut progs: Vec<BfNode> = (0..n)
        .map(|_| BfNode { incoming, dist: UNREACHABLE, sent: UNREACHABLE, start: 2, h })
        .collect();
    for &(v, d) in seeds {
        progs[v].dist = progs[v].dist.min(d);
    }
    progs[src].dist = 0;
    progs[src].start = 1;
    run_synchronous(net, &mut progs, Stop::Horizon(h), h + PIPE_SLACK, ledger, phase)?;
    Ok(progs.into_iter().map(|p| p.dist).collect())
}

/// Exact `h`-hop distances from `src`.
pub fn distributed_bellman_ford(
    net: &CommNetwork,
    g: &WeightedDigraph,
    src: NodeId,
    h: u64,
    ledger: &mut RoundLedger,
) -> Result<DistanceVector> {
    let incoming = incoming_by_position(net, g);
    let d = bellman_ford_with(net, &incoming, src, &[], h, ledger, "bellman-ford")?;
    Ok(DistanceVector::new(d, Kind::Exact))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::oracle::hop_limited;

    fn path() -> (CommNetwork, WeightedDigraph) {
        let g = WeightedDigraph::new(
            3,
            vec![Edge { tail: 0, head: 1, weight: 2 }, Edge { tail: 1, head: 2, weight: 3 }],
            3,
            0,
        )
        .unwrap();
        (CommNetwork::from_digraph(&g).unwrap(), g)
    }

    #[test]
    fn two_hops_on_path() {
        let (net, g) = path();
        let mut l = RoundLedger::new(3);
        let d = distributed_bellman_ford(&net, &g, 0, 2, &mut l).unwrap();
        assert_eq!(d.values, vec![0, 2, 5]);
        assert!(l.rounds <= 2 + PIPE_SLACK);
        assert!(l.max_node_broadcasts() <= 2);
    }

    #[test]
    fn one_hop_cuts_far_node() {
        let (net, g) = path();
        let mut l = RoundLedger::new(3);
        let d = distributed_bellman_ford(&net, &g, 0, 1, &mut l).unwrap();
        assert_eq!(d.values, vec![0, 2, UNREACHABLE]);
    }

    #[test]
    fn improvement_needs_more_hops() {
        // 0->2 direct costs 10, 0->1->2 costs 2.
        let g = WeightedDigraph::new(
            3,
            vec![
                Edge { tail: 0, head: 2, weight: 10 },
                Edge { tail: 0, head: 1, weight: 1 },
                Edge { tail: 1, head: 2, weight: 1 },
            ],
            10,
            0,
        )
        .unwrap();
        let net = CommNetwork::from_digraph(&g).unwrap();
        for h in 1..4 {
            let mut l = RoundLedger::new(3);
            let d = distributed_bellman_ford(&net, &g, 0, h, &mut l).unwrap();
            assert_eq!(d.values, hop_limited(&g, 0, h).unwrap().values);
        }
    }

    #[test]
    fn seeds_count_as_one_hop() {
        let (net, g) = path();
        let incoming = incoming_by_position(&net, &g);
        let mut l = RoundLedger::new(3);
        let d = bellman_ford_with(&net, &incoming, 0, &[(2, 1)], 1, &mut l, "bf").unwrap();
        assert_eq!(d, vec![0, 2, 1]);
        let mut l = RoundLedger::new(3);
        let d = bellman_ford_with(&net, &incoming, 0, &[(1, 1)], 1, &mut l, "bf").unwrap();
        assert_eq!(d, vec![0, 1, UNREACHABLE]);
    }
}
