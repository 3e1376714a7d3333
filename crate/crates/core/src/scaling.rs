//! Recursive weight scaling: exact SSSP from an auxiliary algorithm whose
//! estimates `d̂` are within a factor 2 below the truth and dominate every
//! edge (`d̂(v) ≤ d̂(u) + w(u, v)`).
//!
//! A frame with distance bound `Δ` shifts weights right by `δ` bits, asks
//! the auxiliary algorithm for `d̂` on the shifted graph, reweights with the
//! potentials `2^δ·⌈d̂⌉` and recurses with `⌊¾Δ⌋`. The integer ceiling keeps
//! both properties of `d̂` (domination has integer weights on the right),
//! so all arithmetic stays in exact integers.

use serde::Serialize;

use crate::auxiliary::{auxiliary_sssp, AuxParams, Backend};
use crate::engine::RoundLedger;
use crate::error::{Error, Result};
use crate::graph::{CommNetwork, DistanceVector, Edge, HalfDistances, Kind, NodeId, WeightedDigraph, UNREACHABLE};
use crate::oracle::{check_reachable, dijkstra};
use crate::primitives::incoming_by_position;
use crate::tree::{approximate_diameter_with_tree, build_bfs_tree, global_and, global_sum, BfsTree};
use crate::mix_seed;

/// `max(⌊log₂ Δ − log₂ n − 1⌋, 0)`.
pub fn shift_for(delta: u64, n: usize) -> u32 {
    let n = n as u128;
    let delta = delta as u128;
    // Largest t with n·2^t ≤ Δ equals ⌊log₂(Δ/n)⌋.
    if delta < 2 * n {
        return 0;
    }
    let mut t = 0u32;
    while n << (t + 1) <= delta {
        t += 1;
    }
    t - 1
}

/// Keeps edges of weight at most `Δ` and shifts their weights right by `δ`.
pub fn scale_down(g: &WeightedDigraph, delta: u64) -> (WeightedDigraph, u32) {
    let shift = shift_for(delta, g.node_count());
    let edges: Vec<Edge> = g
        .edges()
        .iter()
        .filter(|e| e.weight <= delta)
        .map(|e| Edge { weight: e.weight >> shift, ..*e })
        .collect();
    let bound = delta >> shift;
    let g_hat = WeightedDigraph::new(g.node_count(), edges, bound, g.source()).expect("weights within Δ/2^δ");
    (g_hat, shift)
}

/// `w(u, v) + 2^δ·⌈d̂(u)⌉ − 2^δ·⌈d̂(v)⌉` on every edge of `g`.
pub fn reweight(g: &WeightedDigraph, d_hat: &HalfDistances, shift: u32) -> Result<WeightedDigraph> {
    let phi: Vec<u128> = (0..g.node_count()).map(|v| (d_hat.ceil(v) as u128) << shift).collect();
    let mut edges = Vec::with_capacity(g.edge_count());
    let mut w_max = 0u64;
    for e in g.edges() {
        let w = e.weight as u128 + phi[e.tail];
        if w < phi[e.head] {
            return Err(Error::InvariantViolation(format!(
                "negative reweighted edge ({}, {})",
                e.tail, e.head
            )));
        }
        let w = u64::try_from(w - phi[e.head]).map_err(|_| Error::Overflow("reweighted edge".into()))?;
        w_max = w_max.max(w);
        edges.push(Edge { weight: w, ..*e });
    }
    WeightedDigraph::new(g.node_count(), edges, w_max, g.source())
}

/// `dist_{G′}(v) + 2^δ·⌈d̂(v)⌉`.
pub fn combine(dist_gp: &[u64], d_hat: &HalfDistances, shift: u32) -> Vec<u64> {
    dist_gp
        .iter()
        .enumerate()
        .map(|(v, &d)| d + (d_hat.ceil(v) << shift))
        .collect()
}

/// Whatever produces the per-frame estimates.
pub trait Auxiliary {
    /// `d̂` on `g_hat` satisfying both properties, or an error; retryable
    /// errors trigger a fresh attempt with a new seed.
    fn estimate(&mut self, g_hat: &WeightedDigraph, seed: u64) -> Result<HalfDistances>;

    /// Every node tells its neighbours its potential.
    fn exchange(&mut self);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalingConfig {
    /// Sequential cross-checks of every frame; costly, meant for tests.
    pub frame_checks: bool,
    pub max_attempts: u32,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self { frame_checks: false, max_attempts: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FrameRecord {
    pub level: u32,
    pub delta: u64,
    pub shift: u32,
    pub max_scaled_weight: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScalingStats {
    /// Frames with `Δ ≥ 1`, i.e. calls to the auxiliary algorithm.
    pub calls: u32,
    pub retries: u32,
    pub frames: Vec<FrameRecord>,
}

/// Exact distances in `g`, provided every distance is at most `delta`.
pub fn scaled_sssp<A: Auxiliary>(
    aux: &mut A,
    g: &WeightedDigraph,
    delta: u64,
    seed: u64,
    cfg: ScalingConfig,
    stats: &mut ScalingStats,
) -> Result<Vec<u64>> {
    frame(aux, g, delta, 0, seed, cfg, stats)
}

fn frame<A: Auxiliary>(
    aux: &mut A,
    g: &WeightedDigraph,
    delta: u64,
    level: u32,
    seed: u64,
    cfg: ScalingConfig,
    stats: &mut ScalingStats,
) -> Result<Vec<u64>> {
    let n = g.node_count();
    if delta < 1 {
        return Ok(vec![0; n]);
    }
    stats.calls += 1;
    let (g_hat, shift) = scale_down(g, delta);
    let max_scaled = g_hat.edges().iter().map(|e| e.weight).max().unwrap_or(0);
    if max_scaled > 4 * n as u64 {
        return Err(Error::InvariantViolation(format!("scaled weight {max_scaled} exceeds 4n")));
    }
    stats.frames.push(FrameRecord { level, delta, shift, max_scaled_weight: max_scaled });

    let mut attempt = 0;
    let d_hat = loop {
        match aux.estimate(&g_hat, mix_seed(seed, ((level as u64) << 8) | attempt as u64)) {
            Ok(d) => break d,
            Err(e) if e.is_retryable() => {
                attempt += 1;
                stats.retries += 1;
                if attempt >= cfg.max_attempts {
                    return Err(Error::RetriesExhausted { attempts: attempt, last: Box::new(e) });
                }
            }
            Err(e) => return Err(e),
        }
    };
    aux.exchange();
    let g_prime = reweight(g, &d_hat, shift)?;
    let child = ((delta as u128 * 3) / 4) as u64;
    if cfg.frame_checks {
        let d = dijkstra(&g_prime, g.source());
        if let Some(v) = (0..n).find(|&v| d.values[v] > child) {
            return Err(Error::InvariantViolation(format!(
                "reweighted distance {} at node {v} exceeds ⌊¾Δ⌋ = {child}",
                d.values[v]
            )));
        }
    }
    let sub = frame(aux, &g_prime, child, level + 1, seed, cfg, stats)?;
    Ok(combine(&sub, &d_hat, shift))
}

/// The local Bellman equations every node checks on the candidate.
pub fn local_conditions(g: &WeightedDigraph, d: &[u64]) -> Vec<bool> {
    (0..g.node_count())
        .map(|v| {
            if v == g.source() {
                return d[v] == 0;
            }
            let best = g
                .in_edges(v)
                .iter()
                .filter(|&&(u, _)| d[u] != UNREACHABLE)
                .map(|&(u, w)| d[u] + w)
                .min()
                .unwrap_or(UNREACHABLE);
            d[v] != UNREACHABLE && d[v] == best
        })
        .collect()
}

/// One exchange round plus a global AND of the local Bellman equations.
pub fn verify_sssp(
    net: &CommNetwork,
    tree: &BfsTree,
    g: &WeightedDigraph,
    d: &[u64],
    ledger: &mut RoundLedger,
) -> bool {
    ledger.charge("verify/exchange", 1);
    for v in 0..net.node_count() {
        ledger.record_words(v, 1);
    }
    let ok = local_conditions(g, d);
    global_and(tree, &ok, ledger, "verify/and")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    V1,
    V2,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::V1 => "v1",
            Variant::V2 => "v2",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "v1" => Ok(Variant::V1),
            "v2" => Ok(Variant::V2),
            _ => Err(Error::InvalidParameter(format!("unknown variant {s:?}"))),
        }
    }
}

fn round_half_up(x: f64) -> u64 {
    (x + 0.5).floor().max(0.0) as u64
}

/// Hop parameters `(h, h′)` from `n` and a diameter bound; `h′` only for v2.
pub fn choose_parameters(n: usize, d_hat: u64, variant: Variant) -> (u64, Option<u64>) {
    let nf = n as f64;
    let d = d_hat.max(1) as f64;
    let clamp = |h: u64| h.clamp(1, n.max(1) as u64);
    match variant {
        Variant::V1 => (clamp(round_half_up((nf * d).sqrt())), None),
        Variant::V2 => {
            let (h, hp) = if d >= nf.powf(0.4) {
                (round_half_up(nf.sqrt() * d.powf(0.25)), round_half_up(nf.sqrt() / d.powf(0.75)))
            } else {
                (round_half_up(nf.powf(0.6)), round_half_up(nf.powf(0.2)))
            };
            (clamp(h), Some(clamp(hp.max(1))))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactParams {
    pub variant: Variant,
    pub seed: u64,
    /// Overrides for the hop parameters.
    pub h: Option<u64>,
    pub h_prime: Option<u64>,
    pub frame_checks: bool,
}

impl ExactParams {
    pub fn new(variant: Variant, seed: u64) -> Self {
        Self { variant, seed, h: None, h_prime: None, frame_checks: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactOutcome {
    pub dist: DistanceVector,
    /// Diameter value used to pick parameters: exact for v1, the
    /// distributed estimate for v2.
    pub diameter_used: u64,
    pub h: u64,
    pub h_prime: Option<u64>,
    pub scaling_calls: u32,
    pub retries: u32,
    pub restarts: u32,
    pub frames: Vec<FrameRecord>,
}

/// The host network acting as the auxiliary algorithm.
pub struct HostAux<'a> {
    pub net: &'a CommNetwork,
    pub tree: &'a BfsTree,
    pub params: AuxParams,
    pub checks: bool,
    pub ledger: &'a mut RoundLedger,
}

impl Auxiliary for HostAux<'_> {
    fn estimate(&mut self, g_hat: &WeightedDigraph, seed: u64) -> Result<HalfDistances> {
        auxiliary_sssp(self.net, self.tree, g_hat, self.params, seed, self.checks, self.ledger).map(|o| o.d_hat)
    }

    fn exchange(&mut self) {
        self.ledger.charge("scaling/reweight", 1);
        for v in 0..self.net.node_count() {
            self.ledger.record_words(v, 1);
        }
    }
}

/// Checks the library preconditions shared by every entry point.
pub fn check_input(net: &CommNetwork, g: &WeightedDigraph) -> Result<()> {
    if !net.supports(g) {
        return Err(Error::InvalidParameter("graph edges must run along network links".into()));
    }
    if !check_reachable(g) {
        let d = dijkstra(g, g.source());
        let v = d.values.iter().position(|&x| x == UNREACHABLE).unwrap_or(0);
        return Err(Error::Unreachable(v));
    }
    Ok(())
}

/// Las Vegas exact SSSP: scaling recursion, distributed verification, and
/// a full restart whenever verification fails.
pub fn exact_sssp(
    net: &CommNetwork,
    g: &WeightedDigraph,
    params: ExactParams,
    ledger: &mut RoundLedger,
) -> Result<ExactOutcome> {
    check_input(net, g)?;
    let n = g.node_count();
    let (tree, diameter_used) = match params.variant {
        Variant::V1 => (build_bfs_tree(net, 0, ledger)?, net.hop_diameter()),
        Variant::V2 => approximate_diameter_with_tree(net, ledger)?,
    };
    let (h0, hp0) = choose_parameters(n, diameter_used, params.variant);
    let h = params.h.unwrap_or(h0).clamp(1, n as u64);
    let h_prime = match params.variant {
        Variant::V1 => None,
        Variant::V2 => Some(params.h_prime.or(hp0).unwrap_or(1).max(1)),
    };
    let backend = match h_prime {
        None => Backend::Dijkstra,
        Some(hp) => Backend::Blc { h_prime: hp },
    };
    // Every node learns n and W (as a maximum) before the recursion starts.
    let ones = vec![1u64; n];
    global_sum(&tree, &ones, ledger, "scaling/setup");
    let local_max: Vec<u64> = (0..n).map(|v| g.in_edges(v).iter().map(|&(_, w)| w).max().unwrap_or(0)).collect();
    crate::tree::global_max(&tree, &local_max, ledger, "scaling/setup");
    let delta0 = (n as u64)
        .checked_mul(g.max_weight())
        .ok_or_else(|| Error::Overflow("initial bound n·W".into()))?;
    (n as u64 + 1)
        .checked_mul(g.max_weight())
        .ok_or_else(|| Error::Overflow("reweighted edge bound (n + 1)·W".into()))?;

    let cfg = ScalingConfig { frame_checks: params.frame_checks, max_attempts: 5 };
    let mut retries = 0;
    let mut last_err = None;
    for restart in 0..5u32 {
        let mut stats = ScalingStats::default();
        let mut aux = HostAux {
            net,
            tree: &tree,
            params: AuxParams { h, backend },
            checks: params.frame_checks,
            ledger,
        };
        let run_seed = mix_seed(params.seed, 0x5ca1e ^ restart as u64);
        let dist = scaled_sssp(&mut aux, g, delta0, run_seed, cfg, &mut stats);
        retries += stats.retries;
        match dist {
            Ok(dist) => {
                if verify_sssp(net, &tree, g, &dist, ledger) {
                    return Ok(ExactOutcome {
                        dist: DistanceVector::new(dist, Kind::Exact),
                        diameter_used,
                        h,
                        h_prime,
                        scaling_calls: stats.calls,
                        retries,
                        restarts: restart,
                        frames: stats.frames,
                    });
                }
                last_err = Some(Error::ValidationFailed("distributed verification rejected the result".into()));
            }
            Err(e @ Error::RetriesExhausted { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(Error::RetriesExhausted { attempts: 5, last: Box::new(last_err.expect("at least one attempt")) })
}

/// Incoming weights per adjacency position; re-exported for callers that
/// drive primitives directly.
pub fn local_inputs(net: &CommNetwork, g: &WeightedDigraph) -> Vec<u64> {
    incoming_by_position(net, g)
}

/// Upper bound on the number of frames with `Δ ≥ 1`: `⌈log_{4/3}(n·W)⌉ + 1`.
pub fn frame_bound(n: usize, w: u64) -> u32 {
    let nw = n as f64 * w as f64;
    if nw < 1.0 {
        return 1;
    }
    (nw.ln() / (4.0f64 / 3.0).ln()).ceil() as u32 + 1
}

/// Every node reachable?  Helper for tests that build graphs by hand.
pub fn reachable_from(g: &WeightedDigraph, s: NodeId) -> bool {
    g.with_source(s).map(|h| check_reachable(&h)).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn shift_examples() {
        assert_eq!(shift_for(16, 4), 1);
        assert_eq!(shift_for(1, 2), 0);
        assert_eq!(shift_for(7, 2), 0);
        assert_eq!(shift_for(8, 2), 1);
        // ⌊log₂ Δ − log₂ n − 1⌋ with Δ = 100, n = 3: log₂(100/3) ≈ 5.06.
        assert_eq!(shift_for(100, 3), 4);
    }

    #[test]
    fn scale_down_drops_heavy_edges() {
        let g = WeightedDigraph::new(
            4,
            vec![Edge { tail: 0, head: 1, weight: 17 }, Edge { tail: 1, head: 2, weight: 9 }],
            17,
            0,
        )
        .unwrap();
        let (gh, shift) = scale_down(&g, 16);
        assert_eq!(shift, 1);
        assert_eq!(gh.edges(), &[Edge { tail: 1, head: 2, weight: 4 }]);
        let (gh, shift) = scale_down(&g, 1);
        assert_eq!(shift, 0);
        assert!(gh.edges().is_empty());
    }

    #[test]
    fn reweight_and_combine_examples() {
        let g = WeightedDigraph::new(2, vec![Edge { tail: 0, head: 1, weight: 5 }], 5, 0).unwrap();
        let d = HalfDistances { doubled: vec![6, 8] };
        let gp = reweight(&g, &d, 1).unwrap();
        assert_eq!(gp.edges()[0].weight, 3);
        let zero = reweight(&g, &HalfDistances::zeros(2), 3).unwrap();
        assert_eq!(zero.edges(), g.edges());
        assert_eq!(combine(&[3], &HalfDistances { doubled: vec![8] }, 1), vec![11]);
        assert_eq!(combine(&[3, 4], &HalfDistances::zeros(2), 0), vec![3, 4]);
        let bad = HalfDistances { doubled: vec![0, 40] };
        assert!(matches!(reweight(&g, &bad, 0), Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn parameter_examples() {
        assert_eq!(choose_parameters(100, 16, Variant::V1), (40, None));
        assert_eq!(choose_parameters(4096, 64, Variant::V2), (181, Some(3)));
        assert_eq!(choose_parameters(4096, 8, Variant::V2), (147, Some(5)));
        assert_eq!(choose_parameters(1, 1, Variant::V1), (1, None));
    }

    #[test]
    fn local_conditions_detect_perturbation() {
        let g = path();
        assert!(local_conditions(&g, &[0, 2, 5]).iter().all(|&b| b));
        assert!(!local_conditions(&g, &[0, 3, 5]).iter().all(|&b| b));
        assert!(!local_conditions(&g, &[1, 2, 5]).iter().all(|&b| b));
    }

    #[test]
    fn frame_bound_values() {
        assert_eq!(frame_bound(3, 0), 1);
        assert_eq!(frame_bound(3, 3), 9);
    }
}
