//! Skeleton sampling and skeleton edge weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::RoundLedger;
use crate::error::{Error, Result};
use crate::graph::{CommNetwork, NodeId, WeightedDigraph, UNREACHABLE};
use crate::primitives::bounded_hop::multi_source_bounded_hop_approx;
use crate::tree::{global_sum, BfsTree};

/// Per-node sampling probability `min(8·ln n / h, 1)`.
pub fn skeleton_probability(n: usize, h: u64) -> f64 {
    (8.0 * (n as f64).ln() / h as f64).min(1.0)
}

/// Abort threshold `24·n·ln n / h` on the skeleton size.
pub fn skeleton_limit(n: usize, h: u64) -> f64 {
    24.0 * n as f64 * (n as f64).ln() / h as f64
}

fn coins(n: usize, source: NodeId, h: u64, seed: u64) -> Result<Vec<bool>> {
    if h == 0 || h > n as u64 {
        return Err(Error::InvalidParameter(format!("hop parameter {h} outside [1, {n}]")));
    }
    let p = skeleton_probability(n, h);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|v| rng.gen_bool(p) || v == source).collect())
}

fn check_size(n: usize, h: u64, size: usize) -> Result<()> {
    let limit = skeleton_limit(n, h);
    if n > 1 && size as f64 > limit {
        return Err(Error::SkeletonTooLarge { size, limit });
    }
    Ok(())
}

/// Local coin flips; the source always joins. Returns sorted members.
pub fn sample_skeleton(n: usize, source: NodeId, h: u64, seed: u64) -> Result<Vec<NodeId>> {
    let flags = coins(n, source, h, seed)?;
    let members: Vec<NodeId> = (0..n).filter(|&v| flags[v]).collect();
    check_size(n, h, members.len())?;
    Ok(members)
}

/// Samples the skeleton and counts it with one global upcast.
pub fn build_skeleton(
    tree: &BfsTree,
    g: &WeightedDigraph,
    h: u64,
    seed: u64,
    ledger: &mut RoundLedger,
) -> Result<Vec<NodeId>> {
    let n = g.node_count();
    let flags = coins(n, g.source(), h, seed)?;
    let counts: Vec<u64> = flags.iter().map(|&f| u64::from(f)).collect();
    let size = global_sum(tree, &counts, ledger, "aux/skeleton-count");
    check_size(n, h, size as usize)?;
    Ok((0..n).filter(|&v| flags[v]).collect())
}

/// Complete digraph on the skeleton with `w_H(x, y) = d̃(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonGraph {
    pub nodes: Vec<NodeId>,
    /// Position of the source inside `nodes`.
    pub source_index: usize,
    /// Row-major `|C|×|C|` weights; [`UNREACHABLE`] when no `h`-hop path exists.
    pub weights: Vec<u64>,
}

impl SkeletonGraph {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn weight(&self, i: usize, j: usize) -> u64 {
        self.weights[i * self.nodes.len() + j]
    }

    /// The skeleton as a digraph over indices `0..|C|`, rooted at the source.
    pub fn to_digraph(&self) -> WeightedDigraph {
        let c = self.size();
        let mut edges = Vec::new();
        for i in 0..c {
            for j in 0..c {
                let w = self.weight(i, j);
                if i != j && w != UNREACHABLE {
                    edges.push(crate::graph::Edge { tail: i, head: j, weight: w });
                }
            }
        }
        WeightedDigraph::with_tight_bound(c, edges, self.source_index).expect("indices in range")
    }
}

/// Skeleton weights plus the full estimate rows `d̃(x, ·)` for each `x ∈ C`.
#[derive(Debug, Clone)]
pub struct SkeletonEstimates {
    pub graph: SkeletonGraph,
    pub rows: Vec<Vec<u64>>,
}

/// Runs the multi-source bounded-hop primitive with `ε = 1` from every
/// skeleton node, giving `dist(x, v) ≤ d̃(x, v) ≤ 2·dist^h(x, v)`.
pub fn skeleton_edge_weights(
    net: &CommNetwork,
    g: &WeightedDigraph,
    skeleton: &[NodeId],
    h: u64,
    seed: u64,
    ledger: &mut RoundLedger,
) -> Result<SkeletonEstimates> {
    skeleton_estimates(net, g, skeleton, h, 1, seed, ledger)
}

/// As [`skeleton_edge_weights`] with accuracy `1 + 1/k`.
pub fn skeleton_estimates(
    net: &CommNetwork,
    g: &WeightedDigraph,
    skeleton: &[NodeId],
    h: u64,
    k: u64,
    seed: u64,
    ledger: &mut RoundLedger,
) -> Result<SkeletonEstimates> {
    let rows: Vec<Vec<u64>> = multi_source_bounded_hop_approx(net, g, skeleton, h, k, seed, ledger)?
        .into_iter()
        .map(|d| d.values)
        .collect();
    let c = skeleton.len();
    let mut weights = vec![UNREACHABLE; c * c];
    for i in 0..c {
        for (j, &y) in skeleton.iter().enumerate() {
            weights[i * c + j] = rows[i][y];
        }
    }
    let source_index = skeleton
        .iter()
        .position(|&x| x == g.source())
        .ok_or_else(|| Error::InvalidParameter("skeleton must contain the source".into()))?;
    Ok(SkeletonEstimates { graph: SkeletonGraph { nodes: skeleton.to_vec(), source_index, weights }, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_saturates_for_small_h() {
        assert_eq!(skeleton_probability(100, 10), 1.0);
        let p = skeleton_probability(4096, 512);
        assert!((p - 0.12996).abs() < 1e-4, "{p}");
        let limit = skeleton_limit(4096, 512);
        assert!((limit - 1597.0).abs() < 0.5, "{limit}");
    }

    #[test]
    fn source_always_sampled() {
        for seed in 0..20 {
            let c = sample_skeleton(200, 17, 200, seed).unwrap();
            assert!(c.contains(&17));
        }
        assert_eq!(sample_skeleton(100, 0, 10, 1).unwrap().len(), 100);
        assert!(sample_skeleton(10, 0, 11, 1).is_err());
    }
}
