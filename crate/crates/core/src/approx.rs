//! Monte Carlo `(1 + ε)`-approximate SSSP on directed graphs.
//!
//! Skeleton with `h = √n·D̂^{1/4}`, `(1 + ε/3)`-approximate `h`-hop
//! distances from every skeleton node, clique-model approximate distances
//! on the skeleton graph, and a final local minimum at every node.

use crate::auxiliary::clique::{clique_approx_sssp, host_charge, CliqueLedger};
use crate::auxiliary::skeleton::{build_skeleton, skeleton_estimates};
use crate::engine::{RoundLedger, Word};
use crate::error::{Error, Result};
use crate::graph::{CommNetwork, DistanceVector, Kind, WeightedDigraph, UNREACHABLE};
use crate::mix_seed;
use crate::scaling::check_input;
use crate::tree::{approximate_diameter_with_tree, pipelined_broadcast};

/// `⌈3/ε⌉`, the integer inverse accuracy used by every inner step.
pub fn inner_inverse_accuracy(eps: f64) -> Result<u64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("ε = {eps} outside (0, 1]")));
    }
    // Guard against 3/ε landing a hair above an integer.
    let q = 3.0 / eps;
    let r = q.round();
    Ok(if (q - r).abs() < 1e-9 { r as u64 } else { q.ceil() as u64 })
}

/// `(h, h′)` for a diameter estimate `D̂`.
pub fn approx_parameters(n: usize, d_hat: u64) -> (u64, u64) {
    let nf = n as f64;
    let d = d_hat.max(1) as f64;
    let h = ((nf.sqrt() * d.powf(0.25)) + 0.5).floor() as u64;
    let hp = ((nf.sqrt() / d.powf(0.75)) + 0.5).floor() as u64;
    (h.clamp(1, n.max(1) as u64), hp.max(1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxOutcome {
    pub dist: DistanceVector,
    pub epsilon: f64,
    pub diameter_estimate: u64,
    pub h: u64,
    pub h_prime: u64,
    pub skeleton_size: usize,
    pub retries: u32,
    pub clique: CliqueLedger,
}

pub fn approx_sssp(
    net: &CommNetwork,
    g: &WeightedDigraph,
    eps: f64,
    seed: u64,
    ledger: &mut RoundLedger,
) -> Result<ApproxOutcome> {
    let k = inner_inverse_accuracy(eps)?;
    check_input(net, g)?;
    let n = g.node_count();
    let (tree, d_hat) = approximate_diameter_with_tree(net, ledger)?;
    let (h, h_prime) = approx_parameters(n, d_hat);

    let mut retries = 0;
    let skeleton = loop {
        match build_skeleton(&tree, g, h, mix_seed(seed, 0xa1 + retries as u64), ledger) {
            Ok(c) => break c,
            Err(e @ Error::SkeletonTooLarge { .. }) => {
                retries += 1;
                if retries >= 5 {
                    return Err(Error::RetriesExhausted { attempts: retries, last: Box::new(e) });
                }
            }
            Err(e) => return Err(e),
        }
    };
    let est = skeleton_estimates(net, g, &skeleton, h, k, mix_seed(seed, 0xa2), ledger)?;
    let announce: Vec<_> = skeleton.iter().map(|&x| (x, Word::new(x, 0, 0))).collect();
    pipelined_broadcast(&tree, &announce, ledger, "approx/skeleton-announce");

    let c = skeleton.len();
    let mut cl = CliqueLedger::new(c);
    let hp = h_prime.clamp(1, c as u64);
    let dist_h = clique_approx_sssp(&est.graph.to_digraph(), hp, k, mix_seed(seed, 0xa3), &mut cl)?;
    ledger.charge("approx/clique", host_charge(&cl.words_per_round, net.bandwidth_words(), tree.height));
    for (i, &x) in skeleton.iter().enumerate() {
        ledger.record_words(x, cl.per_node_words[i]);
    }

    let offers: Vec<_> = skeleton
        .iter()
        .zip(&dist_h)
        .filter(|&(_, &d)| d != UNREACHABLE)
        .map(|(&x, &d)| (x, Word::new(x, d, 1)))
        .collect();
    pipelined_broadcast(&tree, &offers, ledger, "approx/final-broadcast");
    let values: Vec<u64> = (0..n)
        .map(|v| {
            (0..c)
                .filter(|&a| dist_h[a] != UNREACHABLE && est.rows[a][v] != UNREACHABLE)
                .map(|a| dist_h[a] + est.rows[a][v])
                .min()
                .unwrap_or(UNREACHABLE)
        })
        .collect();
    Ok(ApproxOutcome {
        dist: DistanceVector::new(values, Kind::Upper),
        epsilon: eps,
        diameter_estimate: d_hat,
        h,
        h_prime: hp,
        skeleton_size: c,
        retries,
        clique: cl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::oracle::dijkstra;

    #[test]
    fn inverse_accuracy_values() {
        assert_eq!(inner_inverse_accuracy(1.0).unwrap(), 3);
        assert_eq!(inner_inverse_accuracy(0.5).unwrap(), 6);
        assert_eq!(inner_inverse_accuracy(0.25).unwrap(), 12);
        assert_eq!(inner_inverse_accuracy(0.7).unwrap(), 5);
        assert!(inner_inverse_accuracy(0.0).is_err());
        assert!(inner_inverse_accuracy(1.5).is_err());
    }

    #[test]
    fn composition_bound() {
        for i in 1..=100 {
            let e = i as f64 / 100.0;
            assert!((1.0 + e / 3.0).powi(2) <= 1.0 + e);
        }
    }

    #[test]
    fn single_edge_sandwich() {
        let g = WeightedDigraph::new(2, vec![Edge { tail: 0, head: 1, weight: 10 }], 10, 0).unwrap();
        let net = CommNetwork::from_digraph(&g).unwrap();
        let mut l = RoundLedger::new(2);
        let o = approx_sssp(&net, &g, 1.0, 3, &mut l).unwrap();
        assert_eq!(o.dist.values[0], 0);
        assert!((10..=20).contains(&o.dist.values[1]));
        let exact = dijkstra(&g, 0);
        assert!(exact.values[1] <= o.dist.values[1]);
    }
}
