//! The auxiliary algorithm: estimates `d̂` with `½·dist ≤ d̂ ≤ dist` that
//! also dominate every edge weight.
//!
//! Steps: sample a skeleton, compute 2-approximate `h`-hop distances from
//! every skeleton node, solve SSSP exactly on the resulting skeleton graph
//! `H`, then run `h` rounds of Bellman-Ford on `G` with doubled weights and
//! shortcut edges `s → x` of weight `dist_H(s, x)`. Halving gives `d̂`.

pub mod augment;
pub mod clique;
pub mod skeleton;
pub mod skeleton_sssp;
pub mod validate;

use crate::engine::RoundLedger;
use crate::error::{Error, Result};
use crate::graph::{CommNetwork, HalfDistances, WeightedDigraph};
use crate::oracle::{dijkstra, hop_limited};
use crate::tree::BfsTree;

use augment::{augment_and_finalize, explicit_augmented_graph};
use clique::CliqueLedger;
use skeleton::{build_skeleton, skeleton_edge_weights};
use skeleton_sssp::{skeleton_sssp_blc, skeleton_sssp_dijkstra};
use validate::{validate_domination, validate_half_approximation};

/// How distances on the skeleton graph are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Message-passing Dijkstra over the BFS tree.
    Dijkstra,
    /// Clique-model exact algorithm with inner hop parameter `h_prime`,
    /// replayed on the host network.
    Blc { h_prime: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuxParams {
    pub h: u64,
    pub backend: Backend,
}

#[derive(Debug, Clone)]
pub struct AuxOutcome {
    pub d_hat: HalfDistances,
    pub skeleton_size: usize,
    /// Present for the clique backend.
    pub clique: Option<CliqueLedger>,
}

/// One run of the auxiliary algorithm on `g`. The result is checked against
/// a sequential oracle for both required properties; a failed check comes
/// back as [`Error::ValidationFailed`] so the caller can resample. With
/// `checks`, the augmented graph is also built explicitly and the
/// hop-bounded Bellman-Ford result is compared with its exact distances.
pub fn auxiliary_sssp(
    net: &CommNetwork,
    tree: &BfsTree,
    g: &WeightedDigraph,
    params: AuxParams,
    seed: u64,
    checks: bool,
    ledger: &mut RoundLedger,
) -> Result<AuxOutcome> {
    let n = g.node_count();
    if n == 1 {
        return Ok(AuxOutcome { d_hat: HalfDistances::zeros(1), skeleton_size: 1, clique: None });
    }
    let h = params.h.clamp(1, n as u64);
    let skeleton = build_skeleton(tree, g, h, seed, ledger)?;
    let est = skeleton_edge_weights(net, g, &skeleton, h, seed ^ 0x9e37_79b9, ledger)?;
    let (dist_h, clique) = match params.backend {
        Backend::Dijkstra => (skeleton_sssp_dijkstra(tree, &est.graph, ledger), None),
        Backend::Blc { h_prime } => {
            // The clique algorithm needs every member to know C.
            let announce: Vec<_> = skeleton.iter().map(|&x| (x, crate::engine::Word::new(x, 0, 0))).collect();
            crate::tree::pipelined_broadcast(tree, &announce, ledger, "aux/skeleton-announce");
            let hp = h_prime.clamp(1, skeleton.len() as u64);
            let (d, cl) =
                skeleton_sssp_blc(tree, &est.graph, hp, net.bandwidth_words(), seed ^ 0x7f4a_7c15, checks, ledger)?;
            (d, Some(cl))
        }
    };
    let d_hat = augment_and_finalize(net, tree, g, &skeleton, &dist_h, h, ledger)?;

    let exact = dijkstra(g, g.source()).values;
    if !validate_half_approximation(&exact, &d_hat) {
        return Err(Error::ValidationFailed("estimates outside [dist/2, dist]".into()));
    }
    let dom = validate_domination(g, &d_hat);
    if let Some(e) = dom.violation {
        return Err(Error::ValidationFailed(format!(
            "estimates violate edge ({}, {}) of weight {}",
            e.tail, e.head, e.weight
        )));
    }
    if checks {
        let gp = explicit_augmented_graph(g, &skeleton, &dist_h);
        let full = dijkstra(&gp, g.source()).values;
        if full != d_hat.doubled || hop_limited(&gp, g.source(), h)?.values != full {
            return Err(Error::InvariantViolation("augmented graph needs more than h hops".into()));
        }
        if exact.iter().zip(&full).any(|(&t, &d)| t > d || d > 2 * t) {
            return Err(Error::InvariantViolation("augmented distances outside [dist, 2·dist]".into()));
        }
    }
    Ok(AuxOutcome { d_hat, skeleton_size: skeleton.len(), clique })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{domination_counterexample, generate_instance, InstanceSpec, Model};
    use crate::tree::build_bfs_tree;

    #[test]
    fn single_node() {
        let net = CommNetwork::new(1, &[]).unwrap();
        let g = WeightedDigraph::new(1, vec![], 0, 0).unwrap();
        let mut l = RoundLedger::new(1);
        let t = build_bfs_tree(&net, 0, &mut l).unwrap();
        let p = AuxParams { h: 1, backend: Backend::Dijkstra };
        let o = auxiliary_sssp(&net, &t, &g, p, 0, true, &mut l).unwrap();
        assert_eq!(o.d_hat.doubled, vec![0]);
    }

    #[test]
    fn counterexample_output_dominates() {
        let (net, g) = domination_counterexample();
        let mut l = RoundLedger::new(3);
        let t = build_bfs_tree(&net, 0, &mut l).unwrap();
        for backend in [Backend::Dijkstra, Backend::Blc { h_prime: 1 }] {
            let p = AuxParams { h: 2, backend };
            let o = auxiliary_sssp(&net, &t, &g, p, 5, true, &mut l).unwrap();
            assert!(validate_domination(&g, &o.d_hat).ok);
        }
    }

    #[test]
    fn random_instances_both_backends() {
        for seed in 0..12 {
            let spec = InstanceSpec { n: 60, target_diameter: 8, weight_max: 40, model: Model::ALL[seed as usize % 3], seed };
            let (net, g) = generate_instance(&spec).unwrap();
            let mut l = RoundLedger::new(60);
            let t = build_bfs_tree(&net, 0, &mut l).unwrap();
            for backend in [Backend::Dijkstra, Backend::Blc { h_prime: 3 }] {
                let p = AuxParams { h: 12, backend };
                let o = auxiliary_sssp(&net, &t, &g, p, seed, true, &mut l).unwrap();
                assert_eq!(o.d_hat.doubled.len(), 60);
            }
            assert!(l.is_consistent());
        }
    }
}
