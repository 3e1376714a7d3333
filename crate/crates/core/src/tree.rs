//! BFS spanning tree and the global primitives that run over it.
//!
//! Tree primitives charge rounds in closed form. Their content is still
//! moved hop by hop over tree links so a broken tree shows up as a
//! delivery failure rather than a silently wrong answer.

use crate::engine::{run_synchronous, Ctx, NodeProgram, RoundLedger, Stop, Word};
use crate::error::Result;
use crate::graph::{CommNetwork, NodeId, UNREACHABLE};

/// Extra rounds per pipelined tree operation: one to seed the pipe, one to flush it.
pub const PIPE_SLACK: u64 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsTree {
    pub anchor: NodeId,
    pub parent: Vec<Option<NodeId>>,
    pub depth: Vec<u64>,
    pub children: Vec<Vec<NodeId>>,
    /// Nodes sorted by depth, anchor first.
    pub order: Vec<NodeId>,
    pub height: u64,
}

impl BfsTree {
    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    fn tree_degree(&self, v: NodeId) -> usize {
        self.children[v].len() + usize::from(self.parent[v].is_some())
    }

    fn from_parents(anchor: NodeId, parent: Vec<Option<NodeId>>, depth: Vec<u64>) -> Self {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        for v in 0..n {
            if let Some(p) = parent[v] {
                children[p].push(v);
            }
        }
        let mut order: Vec<NodeId> = (0..n).collect();
        order.sort_by_key(|&v| (depth[v], v));
        let height = depth.iter().copied().max().unwrap_or(0);
        Self { anchor, parent, depth, children, order, height }
    }
}

struct BfsNode {
    id: NodeId,
    parent: Option<NodeId>,
    depth: u64,
    reached: bool,
    sent: bool,
}

impl NodeProgram for BfsNode {
    fn init(&mut self, ctx: &mut Ctx) {
        if self.reached {
            ctx.wake(1, 0);
        }
    }

    fn on_round(&mut self, _ctx: &mut Ctx) -> Option<Word> {
        self.sent = true;
        // Announce the chosen parent so it learns its children.
        Some(Word::new(self.parent.unwrap_or(self.id), self.depth, 0))
    }

    fn on_receive(&mut self, _pos: usize, from: NodeId, w: &Word, ctx: &mut Ctx) {
        if !self.reached {
            self.reached = true;
            self.parent = Some(from);
            self.depth = w.value + 1;
            let r = ctx.round();
            ctx.wake(r + 1, 0);
        }
    }

    fn is_done(&self) -> bool {
        self.sent
    }
}

/// Floods from `anchor`; each node adopts the first sender it hears as
/// parent. A completion echo back to the anchor costs `height` more rounds.
pub fn build_bfs_tree(net: &CommNetwork, anchor: NodeId, ledger: &mut RoundLedger) -> Result<BfsTree> {
    let n = net.node_count();
    let mut progs: Vec<BfsNode> = (0..n)
        .map(|v| BfsNode { id: v, parent: None, depth: 0, reached: v == anchor, sent: false })
        .collect();
    run_synchronous(net, &mut progs, Stop::AllDone, 2 * n as u64 + 2, ledger, "bfs-tree")?;
    let parent = progs.iter().map(|p| p.parent).collect();
    let depth = progs.iter().map(|p| p.depth).collect();
    let tree = BfsTree::from_parents(anchor, parent, depth);
    convergecast(&tree, ledger);
    ledger.charge("bfs-tree/echo", tree.height);
    Ok(tree)
}

/// Tree from anchor 0 plus the estimate `2·ecc(0)`, which every node learns
/// through one more downcast.
pub fn approximate_diameter_with_tree(net: &CommNetwork, ledger: &mut RoundLedger) -> Result<(BfsTree, u64)> {
    let tree = build_bfs_tree(net, 0, ledger)?;
    downcast(&tree, ledger);
    ledger.charge("diameter/downcast", tree.height);
    let d_hat = 2 * tree.height;
    Ok((tree, d_hat))
}

pub fn approximate_diameter(net: &CommNetwork, ledger: &mut RoundLedger) -> Result<u64> {
    approximate_diameter_with_tree(net, ledger).map(|(_, d)| d)
}

/// Every non-anchor sends one word to its parent.
fn convergecast(tree: &BfsTree, ledger: &mut RoundLedger) {
    for v in 0..tree.node_count() {
        if tree.parent[v].is_some() {
            ledger.record_words(v, 1);
        }
    }
}

/// Every node with children sends one word down.
fn downcast(tree: &BfsTree, ledger: &mut RoundLedger) {
    for v in 0..tree.node_count() {
        if !tree.children[v].is_empty() {
            ledger.record_words(v, 1);
        }
    }
}

/// Rounds charged for broadcasting `k` words through `tree`. An empty
/// broadcast never fills the pipe and only pays the slack.
pub fn pipeline_rounds(k: u64, height: u64) -> u64 {
    if k == 0 {
        PIPE_SLACK
    } else {
        k + 2 * height + PIPE_SLACK
    }
}

/// Delivers every `(origin, word)` to all nodes by flooding it along tree
/// links, each node forwarding each word at most once. Returns the words in
/// input order as every node ends up holding them.
pub fn pipelined_broadcast(
    tree: &BfsTree,
    items: &[(NodeId, Word)],
    ledger: &mut RoundLedger,
    phase: &str,
) -> Vec<Word> {
    let n = tree.node_count();
    let mut seen = vec![usize::MAX; n];
    let mut stack = Vec::new();
    for (k, &(origin, _)) in items.iter().enumerate() {
        seen[origin] = k;
        stack.push((origin, None));
        let mut reached = 1;
        while let Some((u, from)) = stack.pop() {
            let forwards = from.is_none() || tree.tree_degree(u) > 1;
            if !forwards {
                continue;
            }
            ledger.record_words(u, 1);
            let nbrs = tree.children[u].iter().copied().chain(tree.parent[u]);
            for v in nbrs {
                if Some(v) != from && seen[v] != k {
                    seen[v] = k;
                    reached += 1;
                    stack.push((v, Some(u)));
                }
            }
        }
        assert_eq!(reached, n, "tree flood missed nodes");
    }
    ledger.charge(phase, pipeline_rounds(items.len() as u64, tree.height));
    items.iter().map(|&(_, w)| w).collect()
}

/// Folds `values` up the tree with `combine` and sends the result back down.
fn aggregate<T: Copy>(
    tree: &BfsTree,
    values: &[T],
    combine: impl Fn(T, T) -> T,
    ledger: &mut RoundLedger,
    phase: &str,
) -> T {
    let mut acc = values.to_vec();
    for &v in tree.order.iter().rev() {
        if let Some(p) = tree.parent[v] {
            acc[p] = combine(acc[p], acc[v]);
        }
    }
    convergecast(tree, ledger);
    downcast(tree, ledger);
    ledger.charge(phase, 2 * tree.height + PIPE_SLACK);
    acc[tree.anchor]
}

/// Global minimum with ties to the smaller node id; `None` when every value
/// is [`UNREACHABLE`].
pub fn global_min_upcast(
    tree: &BfsTree,
    values: &[u64],
    ledger: &mut RoundLedger,
    phase: &str,
) -> Option<(u64, NodeId)> {
    let pairs: Vec<(u64, NodeId)> = values.iter().copied().zip(0..).collect();
    let best = aggregate(tree, &pairs, |a, b| a.min(b), ledger, phase);
    (best.0 != UNREACHABLE).then_some(best)
}

pub fn global_and(tree: &BfsTree, bits: &[bool], ledger: &mut RoundLedger, phase: &str) -> bool {
    aggregate(tree, bits, |a, b| a && b, ledger, phase)
}

pub fn global_max(tree: &BfsTree, values: &[u64], ledger: &mut RoundLedger, phase: &str) -> u64 {
    aggregate(tree, values, |a, b| a.max(b), ledger, phase)
}

pub fn global_sum(tree: &BfsTree, values: &[u64], ledger: &mut RoundLedger, phase: &str) -> u64 {
    aggregate(tree, values, |a, b| a + b, ledger, phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::bfs_hops;

    fn path(n: usize) -> CommNetwork {
        let links: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        CommNetwork::new(n, &links).unwrap()
    }

    fn star(n: usize) -> CommNetwork {
        let links: Vec<_> = (1..n).map(|i| (0, i)).collect();
        CommNetwork::new(n, &links).unwrap()
    }

    #[test]
    fn path_tree_from_end() {
        let net = path(6);
        let mut l = RoundLedger::new(6);
        let t = build_bfs_tree(&net, 0, &mut l).unwrap();
        assert_eq!(t.height, 5);
        assert!(l.rounds <= 2 * 5 + 1);
        assert!(l.is_consistent());
    }

    #[test]
    fn star_tree_depth_one() {
        let net = star(7);
        let mut l = RoundLedger::new(7);
        let t = build_bfs_tree(&net, 0, &mut l).unwrap();
        assert_eq!(t.height, 1);
        assert_eq!(t.children[0].len(), 6);
    }

    #[test]
    fn tree_depths_match_bfs() {
        let links = [(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (4, 5), (5, 0)];
        let net = CommNetwork::new(6, &links).unwrap();
        let mut l = RoundLedger::new(6);
        let t = build_bfs_tree(&net, 2, &mut l).unwrap();
        assert_eq!(t.depth, bfs_hops(&net, 2));
        for v in 0..6 {
            if let Some(p) = t.parent[v] {
                assert!(net.has_link(p, v));
                assert_eq!(t.depth[p] + 1, t.depth[v]);
            }
        }
    }

    #[test]
    fn diameter_estimates() {
        let mut l = RoundLedger::new(5);
        assert_eq!(approximate_diameter(&path(5), &mut l).unwrap(), 8);
        let mut l = RoundLedger::new(5);
        assert_eq!(approximate_diameter(&star(5), &mut l).unwrap(), 2);
    }

    #[test]
    fn pipeline_charges() {
        let net = star(5);
        let mut l = RoundLedger::new(5);
        let t = build_bfs_tree(&net, 0, &mut l).unwrap();
        let before = l.rounds;
        let out = pipelined_broadcast(&t, &[(3, Word::new(3, 9, 0))], &mut l, "p");
        assert_eq!(out, vec![Word::new(3, 9, 0)]);
        assert_eq!(l.rounds - before, 1 + 2 + PIPE_SLACK);
        let before = l.rounds;
        pipelined_broadcast(&t, &[], &mut l, "p");
        assert_eq!(l.rounds - before, PIPE_SLACK);
        assert_eq!(pipeline_rounds(10, 4), 10 + 8 + PIPE_SLACK);
        assert!(l.is_consistent());
    }

    #[test]
    fn min_upcast_ties_and_sentinels() {
        let net = path(4);
        let mut l = RoundLedger::new(4);
        let t = build_bfs_tree(&net, 3, &mut l).unwrap();
        assert_eq!(global_min_upcast(&t, &[0, 1, 2, 3], &mut l, "m"), Some((0, 0)));
        assert_eq!(global_min_upcast(&t, &[5, 2, 2, 7], &mut l, "m"), Some((2, 1)));
        let u = UNREACHABLE;
        assert_eq!(global_min_upcast(&t, &[u, u, 4, u], &mut l, "m"), Some((4, 2)));
        assert_eq!(global_min_upcast(&t, &[u, u, u, u], &mut l, "m"), None);
        assert!(global_and(&t, &[true; 4], &mut l, "a"));
        assert!(!global_and(&t, &[true, false, true, true], &mut l, "a"));
        assert_eq!(global_sum(&t, &[1, 2, 3, 4], &mut l, "s"), 10);
    }
}
