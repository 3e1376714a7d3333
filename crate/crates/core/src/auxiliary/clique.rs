//! Broadcast LOCAL Clique sub-simulator.
//!
//! Every clique node may broadcast one message of any size per round; the
//! ledger records how many words all nodes broadcast in each round. A host
//! network replays round `i` by pipelining its `M_i` words over a BFS tree.

use crate::auxiliary::skeleton::sample_skeleton;
use crate::auxiliary::validate::{validate_domination, validate_half_approximation};
use crate::error::{Error, Result};
use crate::graph::{Edge, HalfDistances, NodeId, WeightedDigraph, UNREACHABLE};
use crate::oracle::dijkstra;
use crate::primitives::bounded_hop::ScalePlan;
use crate::scaling::{local_conditions, scaled_sssp, Auxiliary, ScalingConfig, ScalingStats};
use crate::tree::PIPE_SLACK;
use crate::mix_seed;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CliqueLedger {
    pub words_per_round: Vec<u64>,
    pub per_node_words: Vec<u64>,
}

impl CliqueLedger {
    pub fn new(c: usize) -> Self {
        Self { words_per_round: Vec::new(), per_node_words: vec![0; c] }
    }

    pub fn rounds(&self) -> u64 {
        self.words_per_round.len() as u64
    }

    pub fn total_words(&self) -> u64 {
        self.words_per_round.iter().sum()
    }

    /// One round in which `senders` broadcast `words` words each.
    fn round_from(&mut self, senders: impl IntoIterator<Item = (usize, u64)>) {
        let mut total = 0;
        for (v, w) in senders {
            self.per_node_words[v] += w;
            total += w;
        }
        self.words_per_round.push(total);
    }

    fn all_once(&mut self, c: usize) {
        self.round_from((0..c).map(|v| (v, 1)));
    }
}

/// Host rounds for replaying a clique run: `Σ⌈M_i/B⌉ + R·(2·height + c0)`.
pub fn host_charge(words_per_round: &[u64], bandwidth_words: u64, height: u64) -> u64 {
    let bw = bandwidth_words.max(1);
    let words: u64 = words_per_round.iter().map(|&m| m.div_ceil(bw)).sum();
    words + words_per_round.len() as u64 * (2 * height + PIPE_SLACK)
}

/// Row-major `c×c` minimum edge weights; [`UNREACHABLE`] where absent.
fn dense_weights(g: &WeightedDigraph) -> Vec<u64> {
    let c = g.node_count();
    let mut m = vec![UNREACHABLE; c * c];
    for e in g.edges() {
        let cell = &mut m[e.tail * c + e.head];
        *cell = (*cell).min(e.weight);
    }
    m
}

/// Samples the inner skeleton, retrying an oversized sample up to 3 times.
fn inner_skeleton(c: usize, s: NodeId, h: u64, seed: u64) -> Result<Vec<NodeId>> {
    let mut last = None;
    for attempt in 0..3 {
        match sample_skeleton(c, s, h, mix_seed(seed, 0xc11 + attempt)) {
            Ok(m) => return Ok(m),
            Err(e @ Error::SkeletonTooLarge { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("three attempts"))
}

/// Unsigned lane type for the dense scan kernel.
trait Lane: Copy + Ord + Send {
    const INF: Self;
    fn from_u32(x: u32) -> Self;
    fn to_u32(self) -> u32;
    fn plus(self, o: Self) -> Self;
}

impl Lane for u16 {
    const INF: Self = u16::MAX;
    fn from_u32(x: u32) -> Self {
        x as u16
    }
    fn to_u32(self) -> u32 {
        self as u32
    }
    fn plus(self, o: Self) -> Self {
        self.wrapping_add(o)
    }
}

impl Lane for u32 {
    const INF: Self = u32::MAX;
    fn from_u32(x: u32) -> Self {
        x
    }
    fn to_u32(self) -> u32 {
        self
    }
    fn plus(self, o: Self) -> Self {
        self.wrapping_add(o)
    }
}

/// All bounded-hop scans from `sources`, every scale in parallel, one
/// aggregated clique round per scan level. Returns `d̃(x, ·)` per source.
fn clique_bounded_hop(
    g: &WeightedDigraph,
    sources: &[NodeId],
    h: u64,
    k: u64,
    cl: &mut CliqueLedger,
) -> Result<Vec<Vec<u64>>> {
    let plan = ScalePlan::new(g.node_count(), h, g.max_weight(), k)?;
    // Sums stay below 2·depth + 2, which must not reach the lane's INF.
    if (plan.depth as u64) * 2 + 2 < u16::MAX as u64 {
        Ok(scan_kernel::<u16>(g, sources, &plan, cl))
    } else {
        Ok(scan_kernel::<u32>(g, sources, &plan, cl))
    }
}

fn scan_kernel<T: Lane>(g: &WeightedDigraph, sources: &[NodeId], plan: &ScalePlan, cl: &mut CliqueLedger) -> Vec<Vec<u64>> {
    let c = g.node_count();
    let depth = plan.depth;
    let dense = dense_weights(g);
    let mut rows = vec![vec![UNREACHABLE; c]; sources.len()];
    let mut words_at = vec![0u64; depth as usize + 1];
    let mut scaled = vec![T::INF; c * c];
    let mut row_min = vec![0u32; c];
    let mut dist = vec![T::INF; c];
    let mut frontier: Vec<usize> = Vec::with_capacity(c);
    let nums: Vec<Option<u128>> = dense.iter().map(|&w| (w != UNREACHABLE).then(|| plan.numerator(w))).collect();
    for &i in &plan.scales {
        for (cell, num) in scaled.iter_mut().zip(&nums) {
            *cell = T::from_u32(num.map_or(depth + 1, |x| plan.scaled_numerator(i, x)));
        }
        for (u, m) in row_min.iter_mut().enumerate() {
            *m = scaled[u * c..(u + 1) * c].iter().copied().min().map_or(depth + 1, T::to_u32);
        }
        let table: Vec<u64> = (0..=depth).map(|d| plan.estimate(i, d)).collect();
        for (j, &x) in sources.iter().enumerate() {
            // Scaled weights are at least 1, so a level only feeds later
            // levels and can be relaxed row by row without a queue.
            dist.fill(T::INF);
            dist[x] = T::from_u32(0);
            let mut t = 0u32;
            while t <= depth {
                frontier.clear();
                let tt = T::from_u32(t);
                let mut next = T::INF;
                for (v, &d) in dist.iter().enumerate() {
                    if d == tt {
                        frontier.push(v);
                    } else if d > tt {
                        next = next.min(d);
                    }
                }
                let mut next = next.to_u32();
                for &u in &frontier {
                    words_at[t as usize] += 1;
                    cl.per_node_words[u] += 1;
                    rows[j][u] = rows[j][u].min(table[t as usize]);
                    let row = &scaled[u * c..(u + 1) * c];
                    for (d, &w) in dist.iter_mut().zip(row) {
                        *d = (*d).min(tt.plus(w));
                    }
                    next = next.min(t + row_min[u]);
                }
                t = next;
            }
        }
    }
    cl.words_per_round.extend(words_at);
    rows
}

/// Skeleton graph over `skeleton` (indices into `rows`' columns), announced
/// by each member broadcasting its finite outgoing weights; every node then
/// runs Dijkstra on it locally. Returns `dist_{H′}(s, x)` per member.
fn broadcast_and_solve(skeleton: &[NodeId], s_index: usize, rows: &[Vec<u64>], cl: &mut CliqueLedger) -> Vec<u64> {
    let c = skeleton.len();
    let mut edges = Vec::new();
    let mut sent = Vec::with_capacity(c);
    for a in 0..c {
        let mut count = 0;
        for (b, &y) in skeleton.iter().enumerate() {
            let w = rows[a][y];
            if a != b && w != UNREACHABLE {
                edges.push(Edge { tail: a, head: b, weight: w });
                count += 1;
            }
        }
        sent.push((skeleton[a], count));
    }
    cl.round_from(sent);
    let h = WeightedDigraph::with_tight_bound(c, edges, s_index).expect("indices in range");
    dijkstra(&h, s_index).values
}

/// `h` synchronous Bellman-Ford rounds on the augmented graph: doubled
/// weights plus one-hop seeds that may speak from round 2 on.
fn clique_bellman_ford(g: &WeightedDigraph, seeds: &[(NodeId, u64)], h: u64, cl: &mut CliqueLedger) -> Vec<u64> {
    let c = g.node_count();
    let s = g.source();
    let mut dist = vec![UNREACHABLE; c];
    let mut sent = vec![UNREACHABLE; c];
    dist[s] = 0;
    for &(x, d) in seeds {
        dist[x] = dist[x].min(d);
    }
    for r in 1..=h {
        let speakers: Vec<(NodeId, u64)> = if r == 1 {
            vec![(s, 0)]
        } else {
            (0..c).filter(|&v| dist[v] < sent[v]).map(|v| (v, dist[v])).collect()
        };
        cl.round_from(speakers.iter().map(|&(v, _)| (v, 1)));
        for &(u, du) in &speakers {
            sent[u] = du;
            for &(v, w) in g.out_edges(u) {
                let nd = du + 2 * w;
                if nd < dist[v] {
                    dist[v] = nd;
                }
            }
        }
    }
    dist
}

/// The auxiliary algorithm run inside the clique with hop parameter `h`.
fn clique_auxiliary(g: &WeightedDigraph, h: u64, seed: u64, cl: &mut CliqueLedger) -> Result<HalfDistances> {
    let c = g.node_count();
    if c == 1 {
        return Ok(HalfDistances::zeros(1));
    }
    let h = h.clamp(1, c as u64);
    let s = g.source();
    let skeleton = inner_skeleton(c, s, h, seed)?;
    cl.round_from(skeleton.iter().map(|&x| (x, 1)));
    let rows = clique_bounded_hop(g, &skeleton, h, 1, cl)?;
    let s_index = skeleton.iter().position(|&x| x == s).expect("source sampled");
    let dist_h = broadcast_and_solve(&skeleton, s_index, &rows, cl);
    let seeds: Vec<(NodeId, u64)> = skeleton
        .iter()
        .zip(&dist_h)
        .filter(|&(&x, &d)| x != s && d != UNREACHABLE)
        .map(|(&x, &d)| (x, d))
        .collect();
    let d = HalfDistances { doubled: clique_bellman_ford(g, &seeds, h, cl) };

    let exact = dijkstra(g, s).values;
    if !validate_half_approximation(&exact, &d) {
        return Err(Error::ValidationFailed("inner estimates outside [dist/2, dist]".into()));
    }
    if !validate_domination(g, &d).ok {
        return Err(Error::ValidationFailed("inner estimates do not dominate".into()));
    }
    Ok(d)
}

struct CliqueAux<'a> {
    h: u64,
    cl: &'a mut CliqueLedger,
}

impl Auxiliary for CliqueAux<'_> {
    fn estimate(&mut self, g_hat: &WeightedDigraph, seed: u64) -> Result<HalfDistances> {
        clique_auxiliary(g_hat, self.h, seed, self.cl)
    }

    fn exchange(&mut self) {
        let c = self.cl.per_node_words.len();
        self.cl.all_once(c);
    }
}

/// Nodes reachable from the source; each newly reached node announces
/// itself once, so this costs one round per reachability level.
fn reachability_flood(g: &WeightedDigraph, cl: &mut CliqueLedger) -> Vec<bool> {
    let c = g.node_count();
    let mut reached = vec![false; c];
    reached[g.source()] = true;
    let mut frontier = vec![g.source()];
    while !frontier.is_empty() {
        cl.round_from(frontier.iter().map(|&v| (v, 1)));
        let mut next = Vec::new();
        for &u in &frontier {
            for &(v, _) in g.out_edges(u) {
                if !reached[v] {
                    reached[v] = true;
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    reached
}

/// Exact distances from the source of `g` computed in the clique model:
/// reachability flood, then the scaling recursion over the reachable part
/// with the clique auxiliary algorithm, then a verify-and-restart loop.
pub fn clique_exact_sssp(
    g: &WeightedDigraph,
    h_prime: u64,
    seed: u64,
    checks: bool,
    cl: &mut CliqueLedger,
) -> Result<Vec<u64>> {
    let c = g.node_count();
    if c == 1 {
        return Ok(vec![0]);
    }
    let reached = reachability_flood(g, cl);
    let members: Vec<NodeId> = (0..c).filter(|&v| reached[v]).collect();
    let mut index = vec![usize::MAX; c];
    for (i, &v) in members.iter().enumerate() {
        index[v] = i;
    }
    let edges: Vec<Edge> = g
        .edges()
        .iter()
        .filter(|e| reached[e.tail] && reached[e.head])
        .map(|e| Edge { tail: index[e.tail], head: index[e.head], weight: e.weight })
        .collect();
    let sub = WeightedDigraph::with_tight_bound(members.len(), edges, index[g.source()])?;

    let mut inner = CliqueLedger::new(members.len());
    let delta0 = (members.len() as u64)
        .checked_mul(sub.max_weight())
        .ok_or_else(|| Error::Overflow("clique bound n·W".into()))?;
    let cfg = ScalingConfig { frame_checks: checks, max_attempts: 5 };
    let mut result = None;
    let mut last_err = None;
    for restart in 0..5u64 {
        let mut stats = ScalingStats::default();
        let mut aux = CliqueAux { h: h_prime.clamp(1, members.len() as u64), cl: &mut inner };
        match scaled_sssp(&mut aux, &sub, delta0, mix_seed(seed, restart), cfg, &mut stats) {
            Ok(d) => {
                // Exchange of final values, then one verdict word per node.
                inner.all_once(members.len());
                inner.all_once(members.len());
                if local_conditions(&sub, &d).iter().all(|&b| b) {
                    result = Some(d);
                    break;
                }
                last_err = Some(Error::ValidationFailed("clique verification rejected the result".into()));
            }
            Err(e @ Error::RetriesExhausted { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    cl.words_per_round.extend(&inner.words_per_round);
    for (i, &v) in members.iter().enumerate() {
        cl.per_node_words[v] += inner.per_node_words[i];
    }
    let Some(d) = result else {
        return Err(Error::RetriesExhausted { attempts: 5, last: Box::new(last_err.expect("an attempt ran")) });
    };
    let mut out = vec![UNREACHABLE; c];
    for (i, &v) in members.iter().enumerate() {
        out[v] = d[i];
    }
    Ok(out)
}

/// `(1 + 1/k)`-approximate distances in the clique model: skeleton of hop
/// parameter `h`, bounded-hop estimates from every skeleton node, exact
/// distances on the skeleton after a full edge broadcast, and a local
/// minimum at every node.
pub fn clique_approx_sssp(g: &WeightedDigraph, h: u64, k: u64, seed: u64, cl: &mut CliqueLedger) -> Result<Vec<u64>> {
    let c = g.node_count();
    if c == 1 {
        return Ok(vec![0]);
    }
    let h = h.clamp(1, c as u64);
    let s = g.source();
    let skeleton = inner_skeleton(c, s, h, seed)?;
    cl.round_from(skeleton.iter().map(|&x| (x, 1)));
    let rows = clique_bounded_hop(g, &skeleton, h, k, cl)?;
    let s_index = skeleton.iter().position(|&x| x == s).expect("source sampled");
    let dist_h = broadcast_and_solve(&skeleton, s_index, &rows, cl);
    Ok((0..c)
        .map(|v| {
            skeleton
                .iter()
                .enumerate()
                .filter(|&(a, _)| dist_h[a] != UNREACHABLE && rows[a][v] != UNREACHABLE)
                .map(|(a, _)| dist_h[a] + rows[a][v])
                .min()
                .unwrap_or(UNREACHABLE)
        })
        .collect())
}
