//! Rounding-based `(1 + ε)`-approximate `h`-hop distances.
//!
//! Weights are first lifted to be positive (see [`super::lift`]). For each
//! scale `i` the lifted weight `w⁺` is rounded up to `⌈w⁺·k·h / 2^i⌉` and a
//! bounded-depth scan runs to depth `(2k + 1)·h`: a node broadcasts once, in
//! the round equal to its scaled distance. A path of lifted length `L` is
//! found at the scale with `2^i ≤ L < 2^(i+1)` with additive error at most
//! `2^i / k ≤ L / k`. Lifted lengths are either at most `h` (zero-weight
//! paths, one scale) or above `(k + 1)·n`, which fixes the scale set.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{run_synchronous, Ctx, NodeProgram, RoundLedger, Stop, Word};
use crate::error::{Error, Result};
use crate::graph::{CommNetwork, DistanceVector, Kind, NodeId, WeightedDigraph, UNREACHABLE};
use crate::primitives::incoming_by_position;
use crate::primitives::lift::Lift;

const NO_EDGE: u32 = u32::MAX;

fn floor_log2(x: u128) -> u32 {
    127 - x.max(1).leading_zeros()
}

/// Scales, depth and rounding for one `(n, h, W, 1/ε)` combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalePlan {
    pub lift: Lift,
    /// Hop bound actually used, `min(h, n - 1)` and at least 1.
    pub hops: u64,
    pub depth: u32,
    pub scales: Vec<u32>,
}

impl ScalePlan {
    pub fn new(n: usize, h: u64, w_max: u64, k: u64) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidParameter("hop bound must be at least 1".into()));
        }
        let lift = Lift::new(n, k)?;
        let hops = h.min(n.saturating_sub(1) as u64).max(1);
        let w_plus = lift.lift(w_max)?;
        let depth = (2 * k + 1)
            .checked_mul(hops)
            .filter(|&d| d < u32::MAX as u64 / 2)
            .ok_or_else(|| Error::Overflow("scan depth (2/ε + 1)·h".into()))? as u32;
        let mut scales = vec![floor_log2(hops as u128)];
        if w_max >= 1 {
            let lo = floor_log2(lift.factor()? as u128);
            let hi = floor_log2(hops as u128 * w_plus as u128);
            scales.extend(lo..=hi);
        }
        scales.sort_unstable();
        scales.dedup();
        Ok(Self { lift, hops, depth, scales })
    }

    /// Rounded lifted weight of an original weight `w` at scale `i`;
    /// anything beyond the scan depth is clamped to `depth + 1`.
    pub fn scaled(&self, i: u32, w: u64) -> u32 {
        self.scaled_numerator(i, self.numerator(w))
    }

    /// Scale-independent part of [`ScalePlan::scaled`]: `w⁺·k·h`.
    #[inline]
    pub fn numerator(&self, w: u64) -> u128 {
        let wp = self.lift.lift(w).expect("checked against the bound") as u128;
        wp * self.lift.k as u128 * self.hops as u128
    }

    #[inline]
    pub fn scaled_numerator(&self, i: u32, num: u128) -> u32 {
        let v = (num + (1u128 << i) - 1) >> i;
        v.min(self.depth as u128 + 1) as u32
    }

    /// Unscaled integer estimate for scan distance `d` at scale `i`.
    pub fn estimate(&self, i: u32, d: u32) -> u64 {
        self.lift.unscale_ratio((d as u128) << i, self.lift.k as u128 * self.hops as u128)
    }

    fn scaled_incoming(&self, i: u32, incoming: &[u64]) -> Vec<u32> {
        incoming.iter().map(|&w| if w == UNREACHABLE { NO_EDGE } else { self.scaled(i, w) }).collect()
    }
}

struct ScanNode<'a> {
    incoming: &'a [u32],
    depth: u32,
    best: u32,
    sent: bool,
}

impl NodeProgram for ScanNode<'_> {
    fn init(&mut self, ctx: &mut Ctx) {
        if self.best == 0 {
            ctx.wake(1, 0);
        }
    }

    fn on_round(&mut self, ctx: &mut Ctx) -> Option<Word> {
        // Scan time is one behind the engine round.
        if !self.sent && self.best as u64 + 1 == ctx.round() {
            self.sent = true;
            Some(Word::new(ctx.node(), self.best as u64, 0))
        } else {
            None
        }
    }

    fn on_receive(&mut self, pos: usize, _from: NodeId, w: &Word, ctx: &mut Ctx) {
        let wt = self.incoming[pos];
        if wt == NO_EDGE {
            return;
        }
        let cand = w.value as u32 + wt;
        if cand <= self.depth && cand < self.best {
            self.best = cand;
            ctx.wake(cand as u64 + 1, 0);
        }
    }
}

/// Estimates `d̃` with `dist(src, v) ≤ d̃(v) ≤ (1 + 1/k)·dist^h(src, v)`.
pub fn bounded_hop_approx(
    net: &CommNetwork,
    g: &WeightedDigraph,
    src: NodeId,
    h: u64,
    k: u64,
    ledger: &mut RoundLedger,
) -> Result<DistanceVector> {
    let n = g.node_count();
    let plan = ScalePlan::new(n, h, g.max_weight(), k)?;
    let incoming = incoming_by_position(net, g);
    let mut out = vec![UNREACHABLE; n];
    out[src] = 0;
    if n == 1 {
        return Ok(DistanceVector::new(out, Kind::Upper));
    }
    for &i in &plan.scales {
        let scaled = plan.scaled_incoming(i, &incoming);
        let mut progs: Vec<ScanNode> = (0..n)
            .map(|v| ScanNode {
                incoming: &scaled,
                depth: plan.depth,
                best: if v == src { 0 } else { u32::MAX },
                sent: false,
            })
            .collect();
        let horizon = plan.depth as u64 + 1;
        run_synchronous(net, &mut progs, Stop::Horizon(horizon), horizon, ledger, "bounded-hop/scan")?;
        for (v, p) in progs.iter().enumerate() {
            if p.best <= plan.depth {
                out[v] = out[v].min(plan.estimate(i, p.best));
            }
        }
    }
    Ok(DistanceVector::new(out, Kind::Upper))
}

/// Per-source state of one node, packed so one access touches one word.
#[derive(Clone, Copy)]
struct Entry {
    dist: u32,
    /// Last announced value in the low 31 bits; the top bit marks "queued".
    ann: u32,
}

const QUEUED: u32 = 1 << 31;
const NEVER: u32 = QUEUED - 1;
const FRESH: Entry = Entry { dist: u32::MAX, ann: NEVER };
const CONTINUE: u32 = u32::MAX;

impl Entry {
    fn announced(self) -> u32 {
        self.ann & NEVER
    }

    fn queued(self) -> bool {
        self.ann & QUEUED != 0
    }

    fn owes(self) -> bool {
        self.dist < self.announced()
    }
}

/// All sources of one scale, simulated round by round. Every node follows
/// the same program it would under the generic engine: an improved value
/// wakes the node once it is ready (delay + distance + 1), owed
/// announcements wait in a FIFO, and one word leaves per round. The loop is
/// hand-specialised so the state can be stored source-major.
struct MultiScan<'a> {
    net: &'a CommNetwork,
    incoming: Vec<u32>,
    delay: Vec<u32>,
    depth: u32,
    n: usize,
    /// Indexed `j·n + v`.
    st: Vec<Entry>,
    fifo: Vec<VecDeque<u32>>,
    buckets: VecDeque<Vec<(u32, u32)>>,
    spare: Vec<Vec<(u32, u32)>>,
    base: u64,
}

impl MultiScan<'_> {
    fn ready(&self, j: usize, v: usize) -> u64 {
        self.delay[j] as u64 + self.st[j * self.n + v].dist as u64 + 1
    }

    fn wake(&mut self, at: u64, v: usize, j: u32) {
        let idx = (at - self.base) as usize;
        while self.buckets.len() <= idx {
            let b = self.spare.pop().unwrap_or_default();
            self.buckets.push_back(b);
        }
        self.buckets[idx].push((v as u32, j));
    }

    fn next_round(&mut self) -> Option<u64> {
        while let Some(front) = self.buckets.front() {
            if !front.is_empty() {
                return Some(self.base);
            }
            let b = self.buckets.pop_front().expect("front exists");
            self.spare.push(b);
            self.base += 1;
        }
        None
    }

    fn run(&mut self, sources: &[NodeId], cap: u64, ledger: &mut RoundLedger, phase: &str) -> Result<u64> {
        let n = self.n;
        let mut by_node: Vec<(usize, usize)> = sources.iter().copied().enumerate().map(|(j, x)| (x, j)).collect();
        by_node.sort_unstable();
        for (x, j) in by_node {
            self.st[j * n + x].dist = 0;
            let at = self.ready(j, x);
            self.wake(at, x, j as u32);
        }
        let mut stamp = vec![0u64; n];
        let mut active: Vec<usize> = Vec::new();
        let mut outbox: Vec<(usize, usize, u32)> = Vec::new();
        let mut round = 0u64;
        while let Some(r) = self.next_round() {
            if r > cap {
                ledger.charge(phase, round);
                return Err(Error::BudgetExceeded { cap, ledger: Box::new(ledger.clone()) });
            }
            round = r;
            let bucket = self.buckets.pop_front().unwrap_or_default();
            self.base += 1;
            for &(v, j) in &bucket {
                let v = v as usize;
                if stamp[v] != round {
                    stamp[v] = round;
                    active.push(v);
                }
                if j == CONTINUE {
                    continue;
                }
                let j = j as usize;
                let e = self.st[j * n + v];
                if e.owes() && !e.queued() && self.ready(j, v) <= round {
                    self.st[j * n + v].ann |= QUEUED;
                    self.fifo[v].push_back(j as u32);
                }
            }
            let mut bucket = bucket;
            bucket.clear();
            self.spare.push(bucket);
            for &v in &active {
                while let Some(j) = self.fifo[v].pop_front() {
                    let j = j as usize;
                    let e = &mut self.st[j * n + v];
                    e.ann &= NEVER;
                    if e.owes() {
                        e.ann = e.dist;
                        outbox.push((v, j, e.dist));
                        if !self.fifo[v].is_empty() {
                            self.wake(round + 1, v, CONTINUE);
                        }
                        break;
                    }
                }
            }
            for &(u, j, d) in &outbox {
                ledger.record_words(u, 1);
                for p in self.net.positions(u) {
                    let v = self.net.neighbor_at(p);
                    let wt = self.incoming[self.net.mirror(p)];
                    if wt == NO_EDGE {
                        continue;
                    }
                    let cand = d + wt;
                    let e = &mut self.st[j * n + v];
                    if cand <= self.depth && cand < e.dist {
                        e.dist = cand;
                        if !e.queued() {
                            let at = self.ready(j, v).max(round + 1);
                            self.wake(at, v, j as u32);
                        }
                    }
                }
            }
            active.clear();
            outbox.clear();
        }
        let round = round.max(1);
        ledger.charge(phase, round);
        Ok(round)
    }
}

/// Bounded-hop estimates from every node of `sources` at once. Each scale
/// gives every source a random start delay in `[0, |sources|)`; a node owing
/// several announcements in one round queues them first in, first out and
/// re-announces whenever a value improves. Returns one vector per source.
pub fn multi_source_bounded_hop_approx(
    net: &CommNetwork,
    g: &WeightedDigraph,
    sources: &[NodeId],
    h: u64,
    k: u64,
    seed: u64,
    ledger: &mut RoundLedger,
) -> Result<Vec<DistanceVector>> {
    let n = g.node_count();
    let plan = ScalePlan::new(n, h, g.max_weight(), k)?;
    // Repeated sources share one instance.
    let mut index_of = vec![u32::MAX; n];
    let mut unique: Vec<NodeId> = Vec::new();
    for &x in sources {
        if index_of[x] == u32::MAX {
            index_of[x] = unique.len() as u32;
            unique.push(x);
        }
    }
    let c = unique.len();
    let mut est: Vec<Vec<u64>> = vec![vec![UNREACHABLE; n]; c];
    for (j, &x) in unique.iter().enumerate() {
        est[j][x] = 0;
    }
    let expand = |est: Vec<Vec<u64>>| -> Vec<DistanceVector> {
        sources
            .iter()
            .map(|&x| DistanceVector::new(est[index_of[x] as usize].clone(), Kind::Upper))
            .collect()
    };
    if n == 1 || c == 0 {
        return Ok(expand(est));
    }
    let incoming = incoming_by_position(net, g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = 64 * (plan.depth as u64 + 1 + 3 * c as u64);
    let mut scan = MultiScan {
        net,
        incoming: Vec::new(),
        delay: Vec::new(),
        depth: plan.depth,
        n,
        st: vec![FRESH; c * n],
        fifo: vec![VecDeque::new(); n],
        buckets: VecDeque::new(),
        spare: Vec::new(),
        base: 1,
    };
    for &i in &plan.scales {
        scan.incoming = plan.scaled_incoming(i, &incoming);
        scan.delay = (0..c).map(|_| rng.gen_range(0..c as u32)).collect();
        scan.st.fill(FRESH);
        scan.base = 1;
        scan.run(&unique, cap, ledger, "bounded-hop/multi")?;
        let table: Vec<u64> = (0..=plan.depth).map(|d| plan.estimate(i, d)).collect();
        for (j, row) in est.iter_mut().enumerate() {
            for (v, e) in scan.st[j * n..(j + 1) * n].iter().enumerate() {
                if e.dist <= plan.depth && table[e.dist as usize] < row[v] {
                    row[v] = table[e.dist as usize];
                }
            }
        }
    }
    Ok(expand(est))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::domination_counterexample;
    use crate::graph::Edge;
    use crate::oracle::{dijkstra, hop_limited};

    fn single_edge(w: u64) -> (CommNetwork, WeightedDigraph) {
        let g = WeightedDigraph::new(2, vec![Edge { tail: 0, head: 1, weight: w }], w, 0).unwrap();
        (CommNetwork::from_digraph(&g).unwrap(), g)
    }

    fn check_sandwich(g: &WeightedDigraph, src: NodeId, h: u64, k: u64, d: &[u64]) {
        let exact = dijkstra(g, src).values;
        let hop = hop_limited(g, src, h).unwrap().values;
        for v in 0..g.node_count() {
            assert!(exact[v] <= d[v], "lower bound at {v}: {} > {}", exact[v], d[v]);
            if hop[v] != UNREACHABLE {
                assert!(d[v] as u128 * k as u128 <= hop[v] as u128 * (k + 1) as u128, "upper bound at {v}");
            }
        }
    }

    #[test]
    fn single_edge_sandwich() {
        for h in 1..4 {
            let (net, g) = single_edge(10);
            let mut l = RoundLedger::new(2);
            let d = bounded_hop_approx(&net, &g, 0, h, 1, &mut l).unwrap();
            assert!((10..=20).contains(&d.values[1]));
        }
    }

    #[test]
    fn zero_edge_exact() {
        let (net, g) = single_edge(0);
        let mut l = RoundLedger::new(2);
        let d = bounded_hop_approx(&net, &g, 0, 1, 1, &mut l).unwrap();
        assert_eq!(d.values, vec![0, 0]);
    }

    #[test]
    fn triangle_counterexample_sandwich() {
        let (net, g) = domination_counterexample();
        for k in [1, 2, 4] {
            let mut l = RoundLedger::new(3);
            let d = bounded_hop_approx(&net, &g, 0, 2, k, &mut l).unwrap();
            check_sandwich(&g, 0, 2, k, &d.values);
        }
    }

    #[test]
    fn scale_plan_counts() {
        let p = ScalePlan::new(10, 4, 0, 1).unwrap();
        assert_eq!(p.scales, vec![2]);
        assert_eq!(p.depth, 12);
        let p = ScalePlan::new(10, 4, 7, 2).unwrap();
        let bound = (4u64 * 7 * 2).ilog2() + 4;
        assert!(p.scales.len() as u32 <= bound);
    }

    #[test]
    fn multi_source_matches_single_source_contract() {
        let (net, g) = domination_counterexample();
        let mut l = RoundLedger::new(3);
        let all = multi_source_bounded_hop_approx(&net, &g, &[0, 1, 2], 2, 1, 7, &mut l).unwrap();
        for (j, d) in all.iter().enumerate() {
            check_sandwich(&g.with_source(j).unwrap(), j, 2, 1, &d.values);
        }
        let mut l = RoundLedger::new(3);
        let one = multi_source_bounded_hop_approx(&net, &g, &[0], 2, 1, 7, &mut l).unwrap();
        let mut l = RoundLedger::new(3);
        let single = bounded_hop_approx(&net, &g, 0, 2, 1, &mut l).unwrap();
        assert_eq!(one[0].values, single.values);
    }

    #[test]
    fn repeated_source_gives_equal_rows() {
        let (net, g) = domination_counterexample();
        let mut l = RoundLedger::new(3);
        let d = multi_source_bounded_hop_approx(&net, &g, &[1, 1], 2, 1, 0, &mut l).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0], d[1]);
    }
}
