//! One-call drivers for every algorithm, with oracle cross-checks, and the
//! per-cell sweep used by the CLI.

use std::str::FromStr;

use crate::approx::approx_sssp;
use crate::auxiliary::validate::{validate_domination, validate_half_approximation};
use crate::auxiliary::{auxiliary_sssp, AuxParams, Backend};
use crate::engine::RoundLedger;
use crate::error::{Error, Result};
use crate::generate::{generate_instance, InstanceSpec, Model};
use crate::graph::{CommNetwork, WeightedDigraph, UNREACHABLE};
use crate::oracle::{dijkstra, hop_limited};
use crate::primitives::bellman_ford::distributed_bellman_ford;
use crate::primitives::bounded_hop::bounded_hop_approx;
use crate::report::{median, RunReport, SweepRow};
use crate::scaling::{check_input, choose_parameters, exact_sssp, ExactParams, Variant};
use crate::tree::build_bfs_tree;
use crate::mix_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    BellmanFord,
    BoundedHop,
    Auxiliary,
    ExactV1,
    ExactV2,
    Approx,
}

impl Algo {
    pub const ALL: [Algo; 6] = [
        Algo::BellmanFord,
        Algo::BoundedHop,
        Algo::Auxiliary,
        Algo::ExactV1,
        Algo::ExactV2,
        Algo::Approx,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algo::BellmanFord => "bellman-ford",
            Algo::BoundedHop => "bounded-hop",
            Algo::Auxiliary => "auxiliary",
            Algo::ExactV1 => "exact-v1",
            Algo::ExactV2 => "exact-v2",
            Algo::Approx => "approx",
        }
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub h: Option<u64>,
    pub h_prime: Option<u64>,
    pub eps: f64,
    pub seed: u64,
    pub verify: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { h: None, h_prime: None, eps: 1.0, seed: 0, verify: true }
    }
}

/// `⌈1/ε⌉` for `0 < ε ≤ 1`.
fn inverse_accuracy(eps: f64) -> Result<u64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("ε = {eps} outside (0, 1]")));
    }
    let q = 1.0 / eps;
    let r = q.round();
    Ok(if (q - r).abs() < 1e-9 { r as u64 } else { q.ceil() as u64 })
}

/// `lo ≤ got ≤ (1 + 1/k)·hi` pointwise, with exact integer arithmetic.
fn sandwich(lo: &[u64], got: &[u64], hi: &[u64], k: u64) -> bool {
    lo.iter().zip(got).zip(hi).all(|((&l, &g), &h)| {
        if h == UNREACHABLE {
            return l <= g || l == UNREACHABLE;
        }
        g != UNREACHABLE && l <= g && (g as u128) * (k as u128) <= (h as u128) * (k as u128 + 1)
    })
}

/// Runs `algo` on one instance; `verified` is `None` when checks are off.
pub fn run_algorithm(net: &CommNetwork, g: &WeightedDigraph, algo: Algo, opts: RunOptions) -> Result<RunReport> {
    let n = g.node_count();
    let s = g.source();
    let mut ledger = RoundLedger::new(n);
    let default_h = (n as u64).saturating_sub(1).max(1);
    let report = match algo {
        Algo::BellmanFord => {
            let h = opts.h.unwrap_or(default_h);
            let d = distributed_bellman_ford(net, g, s, h, &mut ledger)?;
            let ok = opts.verify.then(|| hop_limited(g, s, h).map(|o| o.values == d.values)).transpose()?;
            let mut r = RunReport::new(net, g, algo.name(), &ledger, &d);
            r.h = Some(h);
            r.verified = ok;
            r
        }
        Algo::BoundedHop => {
            let h = opts.h.unwrap_or(default_h);
            let k = inverse_accuracy(opts.eps)?;
            let d = bounded_hop_approx(net, g, s, h, k, &mut ledger)?;
            let ok = if opts.verify {
                let lo = dijkstra(g, s).values;
                let hi = hop_limited(g, s, h)?.values;
                Some(sandwich(&lo, &d.values, &hi, k))
            } else {
                None
            };
            let mut r = RunReport::new(net, g, algo.name(), &ledger, &d);
            r.h = Some(h);
            r.verified = ok;
            r.epsilon = Some(opts.eps);
            r
        }
        Algo::Auxiliary => {
            check_input(net, g)?;
            let tree = build_bfs_tree(net, 0, &mut ledger)?;
            let h = opts.h.unwrap_or_else(|| choose_parameters(n, net.hop_diameter(), Variant::V1).0);
            let backend = match opts.h_prime {
                Some(h_prime) => Backend::Blc { h_prime },
                None => Backend::Dijkstra,
            };
            let mut retries = 0;
            let out = loop {
                match auxiliary_sssp(net, &tree, g, AuxParams { h, backend }, mix_seed(opts.seed, retries), false, &mut ledger) {
                    Ok(o) => break o,
                    Err(e) if e.is_retryable() && retries < 4 => retries += 1,
                    Err(e) => return Err(e),
                }
            };
            let ok = opts.verify.then(|| {
                validate_half_approximation(&dijkstra(g, s).values, &out.d_hat) && validate_domination(g, &out.d_hat).ok
            });
            let mut r = RunReport::new(net, g, algo.name(), &ledger, &out.d_hat);
            r.h = Some(h);
            r.h_prime = opts.h_prime;
            r.retries = retries as u32;
            r.verified = ok;
            r
        }
        Algo::ExactV1 | Algo::ExactV2 => {
            let variant = if algo == Algo::ExactV1 { Variant::V1 } else { Variant::V2 };
            let params = ExactParams { h: opts.h, h_prime: opts.h_prime, ..ExactParams::new(variant, opts.seed) };
            let out = exact_sssp(net, g, params, &mut ledger)?;
            let ok = opts.verify.then(|| dijkstra(g, s).values == out.dist.values);
            let mut r = RunReport::new(net, g, variant.name(), &ledger, &out.dist);
            r.h = Some(out.h);
            r.h_prime = out.h_prime;
            r.scaling_calls = out.scaling_calls;
            r.retries = out.retries + out.restarts;
            r.verified = ok;
            r
        }
        Algo::Approx => {
            let out = approx_sssp(net, g, opts.eps, opts.seed, &mut ledger)?;
            let ok = opts.verify.then(|| {
                let exact = dijkstra(g, s).values;
                out.dist.values.iter().zip(&exact).all(|(&d, &t)| {
                    t <= d && (d as f64) <= (1.0 + opts.eps) * t as f64 + 1e-9 * t as f64
                })
            });
            let mut r = RunReport::new(net, g, algo.name(), &ledger, &out.dist);
            r.h = Some(out.h);
            r.h_prime = Some(out.h_prime);
            r.retries = out.retries;
            r.verified = ok;
            r.epsilon = Some(opts.eps);
            r
        }
    };
    Ok(report)
}

/// Generator settings for one sweep cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSpec {
    pub n: usize,
    pub diameter: u64,
    pub weight_max: u64,
    pub model: Model,
    pub algo: Algo,
    pub reps: u32,
    pub seed: u64,
    pub opts: RunOptions,
}

/// Runs `reps` seeded instances and reports medians. A failing run marks
/// the cell unverified instead of aborting the sweep.
pub fn sweep_cell(cell: &CellSpec) -> Result<SweepRow> {
    let mut rounds = Vec::new();
    let mut words = Vec::new();
    let mut verified_all = true;
    let mut h = 0;
    let mut h_prime = None;
    let mut variant = String::new();
    for rep in 0..cell.reps.max(1) {
        let seed = mix_seed(cell.seed, ((cell.n as u64) << 24) ^ (cell.diameter << 8) ^ rep as u64);
        let spec = InstanceSpec {
            n: cell.n,
            target_diameter: cell.diameter,
            weight_max: cell.weight_max,
            model: cell.model,
            seed,
        };
        let (net, g) = generate_instance(&spec)?;
        match run_algorithm(&net, &g, cell.algo, RunOptions { seed, ..cell.opts }) {
            Ok(r) => {
                rounds.push(r.rounds);
                words.push(r.total_words);
                verified_all &= r.verified != Some(false);
                h = r.h.unwrap_or(0);
                h_prime = r.h_prime;
                variant = r.variant;
            }
            Err(_) => verified_all = false,
        }
    }
    if rounds.is_empty() {
        rounds.push(0);
        words.push(0);
        variant = cell.algo.name().to_string();
    }
    Ok(SweepRow {
        n: cell.n,
        diameter: cell.diameter,
        max_weight: cell.weight_max,
        variant,
        h,
        h_prime,
        rounds_median: median(&rounds),
        words_median: median(&words),
        verified_all,
    })
}
