//! Seeded instance generator.
//!
//! Every model returns a connected network whose exact hop diameter lies in
//! `[⌈t/2⌉, 2t]` for the requested target `t`, plus a digraph on the same
//! nodes that contains a BFS out-arborescence from a random source.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{CommNetwork, Edge, NodeId, WeightedDigraph, UNREACHABLE};
use crate::oracle::{bfs_hops, eccentricity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    PathPlusRandom,
    GridPlusRandom,
    ErdosRenyi,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::PathPlusRandom, Model::GridPlusRandom, Model::ErdosRenyi];

    pub fn name(self) -> &'static str {
        match self {
            Model::PathPlusRandom => "path-plus-random",
            Model::GridPlusRandom => "grid-plus-random",
            Model::ErdosRenyi => "erdos-renyi",
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown model {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceSpec {
    pub n: usize,
    pub target_diameter: u64,
    pub weight_max: u64,
    pub model: Model,
    pub seed: u64,
}

pub fn generate_instance(spec: &InstanceSpec) -> Result<(CommNetwork, WeightedDigraph)> {
    let n = spec.n;
    let t = spec.target_diameter;
    if n == 0 {
        return Err(Error::InfeasibleSpec("n must be at least 1".into()));
    }
    if t >= n as u64 || (t == 0 && n > 1) {
        return Err(Error::InfeasibleSpec(format!(
            "target diameter {t} impossible with {n} nodes"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let links = match spec.model {
        _ if n == 1 => Vec::new(),
        Model::PathPlusRandom => layered_path(n, t as usize, &mut rng),
        Model::GridPlusRandom => grid(n, t, &mut rng)?,
        Model::ErdosRenyi => erdos_renyi(n, t, &mut rng)?,
    };
    let mut perm: Vec<NodeId> = (0..n).collect();
    perm.shuffle(&mut rng);
    let links: Vec<_> = links.into_iter().map(|(u, v)| (perm[u], perm[v])).collect();
    let net = CommNetwork::new(n, &links)?;
    let d = net.hop_diameter();
    if d < t.div_ceil(2) || d > 2 * t {
        return Err(Error::InfeasibleSpec(format!(
            "{} produced diameter {d}, outside [{}, {}] for target {t}",
            spec.model.name(),
            t.div_ceil(2),
            2 * t
        )));
    }
    let source = rng.gen_range(0..n);
    let g = orient(&net, source, spec.weight_max, &mut rng)?;
    Ok((net, g))
}

/// Backbone path over layers `0..=t`, extra nodes hung below random nodes of
/// the previous layer, plus random links between equal or adjacent layers.
/// Links never skip a layer and everything is within `t` hops of layer 0,
/// so the diameter lies in `[t, 2t]`.
fn layered_path(n: usize, t: usize, rng: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId)> {
    let mut layers: Vec<Vec<NodeId>> = (0..=t).map(|i| vec![i]).collect();
    let mut layer_of: Vec<usize> = (0..=t).collect();
    let mut links: Vec<(NodeId, NodeId)> = (0..t).map(|i| (i, i + 1)).collect();
    for v in t + 1..n {
        let l = rng.gen_range(1..=t);
        let parent = *layers[l - 1].choose(rng).unwrap();
        links.push((parent, v));
        layers[l].push(v);
        layer_of.push(l);
    }
    for _ in 0..n / 2 {
        let u = rng.gen_range(0..n);
        let l = layer_of[u];
        let lo = l.saturating_sub(1);
        let hi = (l + 1).min(t);
        let target = rng.gen_range(lo..=hi);
        let v = *layers[target].choose(rng).unwrap();
        if u != v {
            links.push((u, v));
        }
    }
    links
}

/// Row-major grid of width `c` filled with `n` nodes; its diameter is
/// `rows + c - 2`.
fn grid_links(n: usize, c: usize) -> Vec<(NodeId, NodeId)> {
    let mut links = Vec::with_capacity(2 * n);
    for i in 0..n {
        if i % c + 1 < c && i + 1 < n {
            links.push((i, i + 1));
        }
        if i + c < n {
            links.push((i, i + c));
        }
    }
    links
}

fn grid(n: usize, t: u64, rng: &mut ChaCha8Rng) -> Result<Vec<(NodeId, NodeId)>> {
    let grid_diameter = |c: usize| (n.div_ceil(c) + c - 2) as u64;
    let best = (1..=n)
        .min_by_key(|&c| (grid_diameter(c).abs_diff(t), std::cmp::Reverse(grid_diameter(c))))
        .unwrap();
    if grid_diameter(best) <= t {
        let mut links = grid_links(n, best);
        // Sparse diagonals keep the lattice flavour without collapsing distances.
        for i in 0..n {
            if i % best + 1 < best && i + best + 1 < n && rng.gen_bool(0.1) {
                links.push((i, i + best + 1));
            }
        }
        return Ok(links);
    }
    let c = (n as f64).sqrt().ceil() as usize;
    let base = grid_links(n, c);
    let extra: Vec<_> = (0..4 * n).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    shortest_prefix(n, base, &extra, t)
}

fn erdos_renyi(n: usize, t: u64, rng: &mut ChaCha8Rng) -> Result<Vec<(NodeId, NodeId)>> {
    let base: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    let extra: Vec<_> = (0..8 * n)
        .map(|_| {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            (u, v)
        })
        .collect();
    shortest_prefix(n, base, &extra, t)
}

/// Appends the shortest prefix of `extra` that brings node 0's
/// eccentricity down to at most `t`; this bounds the diameter by `2t`.
fn shortest_prefix(
    n: usize,
    base: Vec<(NodeId, NodeId)>,
    extra: &[(NodeId, NodeId)],
    t: u64,
) -> Result<Vec<(NodeId, NodeId)>> {
    let ecc_with = |k: usize| -> u64 {
        let mut links = base.clone();
        links.extend_from_slice(&extra[..k]);
        let net = CommNetwork::new(n, &links).expect("base links span the nodes");
        eccentricity(&net, 0)
    };
    if ecc_with(extra.len()) > t {
        return Err(Error::InfeasibleSpec(format!("cannot bring the diameter down to {t}")));
    }
    let (mut lo, mut hi) = (0usize, extra.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if ecc_with(mid) <= t {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let mut links = base;
    links.extend_from_slice(&extra[..lo]);
    Ok(links)
}

/// BFS out-arborescence from `source`, then each remaining link direction
/// with probability one half. Weights are uniform in `[0, w_max]`.
fn orient(net: &CommNetwork, source: NodeId, w_max: u64, rng: &mut ChaCha8Rng) -> Result<WeightedDigraph> {
    let n = net.node_count();
    let hops = bfs_hops(net, source);
    let mut parent = vec![UNREACHABLE as usize; n];
    for v in 0..n {
        if v != source {
            parent[v] = net
                .neighbors(v)
                .iter()
                .copied()
                .find(|&u| hops[u] + 1 == hops[v])
                .expect("connected network");
        }
    }
    let mut edges = Vec::new();
    for (u, v) in net.links() {
        for (a, b) in [(u, v), (v, u)] {
            if parent[b] == a || rng.gen_bool(0.5) {
                edges.push(Edge { tail: a, head: b, weight: rng.gen_range(0..=w_max) });
            }
        }
    }
    WeightedDigraph::new(n, edges, w_max, source)
}

/// Sets each edge weight to zero independently with probability `fraction`.
pub fn with_zeroed_weights(g: &WeightedDigraph, fraction: f64, seed: u64) -> WeightedDigraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = g
        .edges()
        .iter()
        .map(|e| Edge { weight: if rng.gen_bool(fraction) { 0 } else { e.weight }, ..*e })
        .collect();
    WeightedDigraph::new(g.node_count(), edges, g.max_weight(), g.source()).unwrap()
}

/// Three-node triangle `s=0, u=1, v=2` with symmetric weights s–u 31,
/// s–v 28, u–v 1. Rounded bounded-hop estimates on it may violate the
/// domination inequality along u→v.
pub fn domination_counterexample() -> (CommNetwork, WeightedDigraph) {
    let mut edges = Vec::new();
    for (a, b, w) in [(0, 1, 31), (0, 2, 28), (1, 2, 1)] {
        edges.push(Edge { tail: a, head: b, weight: w });
        edges.push(Edge { tail: b, head: a, weight: w });
    }
    let g = WeightedDigraph::new(3, edges, 31, 0).unwrap();
    let net = CommNetwork::from_digraph(&g).unwrap();
    (net, g)
}
