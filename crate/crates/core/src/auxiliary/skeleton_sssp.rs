//! Exact distances on the skeleton graph, two ways.

use crate::auxiliary::clique::{clique_exact_sssp, host_charge, CliqueLedger};
use crate::auxiliary::skeleton::SkeletonGraph;
use crate::engine::{RoundLedger, Word};
use crate::error::Result;
use crate::graph::UNREACHABLE;
use crate::tree::{global_min_upcast, pipelined_broadcast, BfsTree};

/// Message-passing Dijkstra: after the skeleton is announced, each of
/// `|C|` iterations finds the closest unsettled skeleton node by a global
/// minimum upcast and broadcasts its settled distance. Returns
/// `dist_H(s, ·)` indexed like `h.nodes`.
pub fn skeleton_sssp_dijkstra(tree: &BfsTree, h: &SkeletonGraph, ledger: &mut RoundLedger) -> Vec<u64> {
    let c = h.size();
    let announce: Vec<_> = h.nodes.iter().map(|&x| (x, Word::new(x, 0, 0))).collect();
    pipelined_broadcast(tree, &announce, ledger, "aux/skeleton-announce");

    let n = tree.node_count();
    let mut index_of = vec![usize::MAX; n];
    for (i, &x) in h.nodes.iter().enumerate() {
        index_of[x] = i;
    }
    let mut tentative = vec![UNREACHABLE; c];
    let mut settled = vec![false; c];
    tentative[h.source_index] = 0;
    let mut offer = vec![UNREACHABLE; n];
    for _ in 0..c {
        for (i, &x) in h.nodes.iter().enumerate() {
            offer[x] = if settled[i] { UNREACHABLE } else { tentative[i] };
        }
        let Some((d, x)) = global_min_upcast(tree, &offer, ledger, "aux/dijkstra-upcast") else {
            break;
        };
        let i = index_of[x];
        settled[i] = true;
        pipelined_broadcast(tree, &[(x, Word::new(x, d, 0))], ledger, "aux/dijkstra-settle");
        for j in 0..c {
            let w = h.weight(i, j);
            if !settled[j] && w != UNREACHABLE && d + w < tentative[j] {
                tentative[j] = d + w;
            }
        }
    }
    tentative
}

/// Simulates the clique-model exact algorithm on `H` and charges the host
/// network `Σ⌈M_i/B⌉ + R·(2·d_T + c0)` rounds for it.
pub fn skeleton_sssp_blc(
    tree: &BfsTree,
    h: &SkeletonGraph,
    h_prime: u64,
    bandwidth_words: u64,
    seed: u64,
    checks: bool,
    ledger: &mut RoundLedger,
) -> Result<(Vec<u64>, CliqueLedger)> {
    let digraph = h.to_digraph();
    let mut cl = CliqueLedger::new(h.size());
    let dist = clique_exact_sssp(&digraph, h_prime, seed, checks, &mut cl)?;
    ledger.charge("aux/clique", host_charge(&cl.words_per_round, bandwidth_words, tree.height));
    for (i, &x) in h.nodes.iter().enumerate() {
        ledger.record_words(x, cl.per_node_words[i]);
    }
    Ok((dist, cl))
}
