//! Input graph, communication network and distance vectors.
//!
//! Both graph types store compressed adjacency so the simulator can walk
//! neighbourhoods without hashing. Text formats are line based:
//! a digraph is `n m s W` followed by `m` lines `tail head weight`, a
//! network is `n l` followed by `l` lines `u v`.

use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Sentinel for "no path"; compares greater than every real distance.
pub const UNREACHABLE: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
    pub weight: u64,
}

/// Directed graph with non-negative integer weights and a distinguished source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDigraph {
    n: usize,
    edges: Vec<Edge>,
    max_weight: u64,
    source: NodeId,
    out_start: Vec<usize>,
    out_adj: Vec<(NodeId, u64)>,
    in_start: Vec<usize>,
    in_adj: Vec<(NodeId, u64)>,
}

fn csr(n: usize, items: impl Iterator<Item = (usize, usize, u64)> + Clone) -> (Vec<usize>, Vec<(NodeId, u64)>) {
    let mut start = vec![0usize; n + 1];
    for (a, _, _) in items.clone() {
        start[a + 1] += 1;
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut adj = vec![(0, 0); start[n]];
    for (a, b, w) in items {
        adj[fill[a]] = (b, w);
        fill[a] += 1;
    }
    (start, adj)
}

impl WeightedDigraph {
    /// Builds a digraph, checking ids and the declared weight bound.
    pub fn new(n: usize, edges: Vec<Edge>, max_weight: u64, source: NodeId) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph must have at least one node".into()));
        }
        if source >= n {
            return Err(Error::InvalidParameter(format!("source {source} out of range")));
        }
        for e in &edges {
            if e.tail >= n || e.head >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({}, {}) has an endpoint outside [0, {n})",
                    e.tail, e.head
                )));
            }
            if e.weight > max_weight {
                return Err(Error::InvalidParameter(format!(
                    "edge ({}, {}) weight {} exceeds declared bound {max_weight}",
                    e.tail, e.head, e.weight
                )));
            }
        }
        let (out_start, out_adj) = csr(n, edges.iter().map(|e| (e.tail, e.head, e.weight)));
        let (in_start, in_adj) = csr(n, edges.iter().map(|e| (e.head, e.tail, e.weight)));
        Ok(Self { n, edges, max_weight, source, out_start, out_adj, in_start, in_adj })
    }

    /// Like [`new`](Self::new) with the bound set to the largest weight present.
    pub fn with_tight_bound(n: usize, edges: Vec<Edge>, source: NodeId) -> Result<Self> {
        let w = edges.iter().map(|e| e.weight).max().unwrap_or(0);
        Self::new(n, edges, w, source)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn max_weight(&self) -> u64 {
        self.max_weight
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    /// Same edges, different source.
    pub fn with_source(&self, source: NodeId) -> Result<Self> {
        Self::new(self.n, self.edges.clone(), self.max_weight, source)
    }

    pub fn out_edges(&self, v: NodeId) -> &[(NodeId, u64)] {
        &self.out_adj[self.out_start[v]..self.out_start[v + 1]]
    }

    pub fn in_edges(&self, v: NodeId) -> &[(NodeId, u64)] {
        &self.in_adj[self.in_start[v]..self.in_start[v + 1]]
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(16 * (self.edges.len() + 1));
        let _ = writeln!(s, "{} {} {} {}", self.n, self.edges.len(), self.source, self.max_weight);
        for e in &self.edges {
            let _ = writeln!(s, "{} {} {}", e.tail, e.head, e.weight);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = numbered_lines(text);
        let (line, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let h = parse_fields::<4>(line, header)?;
        let (n, m, s, w) = (h[0] as usize, h[1] as usize, h[2] as usize, h[3]);
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, body) = lines.next().ok_or(Error::Parse {
                line: 0,
                msg: format!("expected {m} edge lines"),
            })?;
            let f = parse_fields::<3>(line, body)?;
            edges.push(Edge { tail: f[0] as usize, head: f[1] as usize, weight: f[2] });
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse { line, msg: "trailing content".into() });
        }
        Self::new(n, edges, w, s)
    }
}

fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_fields<const K: usize>(line: usize, body: &str) -> Result<[u64; K]> {
    let mut out = [0u64; K];
    let mut it = body.split_whitespace();
    for slot in out.iter_mut() {
        let tok = it.next().ok_or(Error::Parse { line, msg: format!("expected {K} fields") })?;
        *slot = tok
            .parse()
            .map_err(|_| Error::Parse { line, msg: format!("bad integer {tok:?}") })?;
    }
    if it.next().is_some() {
        return Err(Error::Parse { line, msg: format!("expected {K} fields") });
    }
    Ok(out)
}

/// Undirected communication topology. Neighbour lists are sorted.
#[derive(Debug, Clone)]
pub struct CommNetwork {
    n: usize,
    start: Vec<usize>,
    adj: Vec<NodeId>,
    /// For the adjacency entry `v -> u` at position `p`, `mirror[p]` is the
    /// position of `u -> v`.
    mirror: Vec<usize>,
    bandwidth_words: u64,
    diameter: OnceLock<u64>,
}

impl PartialEq for CommNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.start == other.start && self.adj == other.adj
    }
}

impl Eq for CommNetwork {}

impl CommNetwork {
    /// Builds a network from unordered links. Duplicates and self-loops are
    /// dropped. Fails when the network is disconnected.
    pub fn new(n: usize, links: &[(NodeId, NodeId)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("network must have at least one node".into()));
        }
        let mut pairs: Vec<(NodeId, NodeId)> = Vec::with_capacity(2 * links.len());
        for &(u, v) in links {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!("link ({u}, {v}) out of range")));
            }
            if u != v {
                pairs.push((u, v));
                pairs.push((v, u));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut start = vec![0usize; n + 1];
        for &(u, _) in &pairs {
            start[u + 1] += 1;
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        let adj: Vec<NodeId> = pairs.iter().map(|&(_, v)| v).collect();
        let mut mirror = vec![0usize; adj.len()];
        for u in 0..n {
            for p in start[u]..start[u + 1] {
                let v = adj[p];
                let row = &adj[start[v]..start[v + 1]];
                mirror[p] = start[v] + row.binary_search(&u).expect("symmetric adjacency");
            }
        }
        let net = Self { n, start, adj, mirror, bandwidth_words: 1, diameter: OnceLock::new() };
        if !net.is_connected() {
            return Err(Error::InvalidParameter("communication network is disconnected".into()));
        }
        Ok(net)
    }

    /// The network induced by the edges of `g`, one link per adjacent pair.
    pub fn from_digraph(g: &WeightedDigraph) -> Result<Self> {
        let links: Vec<_> = g.edges().iter().map(|e| (e.tail, e.head)).collect();
        Self::new(g.node_count(), &links)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn link_count(&self) -> usize {
        self.adj.len() / 2
    }

    pub fn bandwidth_words(&self) -> u64 {
        self.bandwidth_words
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[self.start[v]..self.start[v + 1]]
    }

    /// Global adjacency positions of `v`'s neighbour list.
    pub fn positions(&self, v: NodeId) -> std::ops::Range<usize> {
        self.start[v]..self.start[v + 1]
    }

    pub fn neighbor_at(&self, pos: usize) -> NodeId {
        self.adj[pos]
    }

    pub fn mirror(&self, pos: usize) -> usize {
        self.mirror[pos]
    }

    /// Total number of adjacency entries (twice the link count).
    pub fn adjacency_len(&self) -> usize {
        self.adj.len()
    }

    pub fn has_link(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// All links as `(u, v)` with `u < v`.
    pub fn links(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.link_count());
        for u in 0..self.n {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Exact hop diameter, computed once by BFS from every node.
    pub fn hop_diameter(&self) -> u64 {
        *self.diameter.get_or_init(|| crate::oracle::exact_diameter(self))
    }

    /// True iff every edge of `g` runs along a link (self-loops excepted).
    pub fn supports(&self, g: &WeightedDigraph) -> bool {
        g.node_count() == self.n
            && g.edges().iter().all(|e| e.tail == e.head || self.has_link(e.tail, e.head))
    }

    fn is_connected(&self) -> bool {
        crate::oracle::bfs_hops(self, 0).iter().all(|&d| d != UNREACHABLE)
    }

    pub fn to_text(&self) -> String {
        let links = self.links();
        let mut s = String::with_capacity(12 * (links.len() + 1));
        let _ = writeln!(s, "{} {}", self.n, links.len());
        for (u, v) in links {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = numbered_lines(text);
        let (line, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let h = parse_fields::<2>(line, header)?;
        let (n, l) = (h[0] as usize, h[1] as usize);
        let mut links = Vec::with_capacity(l);
        for _ in 0..l {
            let (line, body) = lines.next().ok_or(Error::Parse {
                line: 0,
                msg: format!("expected {l} link lines"),
            })?;
            let f = parse_fields::<2>(line, body)?;
            links.push((f[0] as usize, f[1] as usize));
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse { line, msg: "trailing content".into() });
        }
        Self::new(n, &links)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Exact,
    /// Never below the true distance.
    Upper,
    /// Never above the true distance.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceVector {
    pub values: Vec<u64>,
    pub kind: Kind,
}

impl DistanceVector {
    pub fn new(values: Vec<u64>, kind: Kind) -> Self {
        Self { values, kind }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: NodeId) -> u64 {
        self.values[v]
    }
}

impl Serialize for DistanceVector {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = ser.serialize_seq(Some(self.values.len()))?;
        for &v in &self.values {
            if v == UNREACHABLE {
                seq.serialize_element("UNREACHABLE")?;
            } else {
                seq.serialize_element(&v)?;
            }
        }
        seq.end()
    }
}

/// Half-integer distances held as twice their value, so `doubled[v] = 2·d(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfDistances {
    pub doubled: Vec<u64>,
}

impl HalfDistances {
    pub fn zeros(n: usize) -> Self {
        Self { doubled: vec![0; n] }
    }

    /// Smallest integer not below `d(v)`.
    pub fn ceil(&self, v: NodeId) -> u64 {
        self.doubled[v].div_ceil(2)
    }

    pub fn ceil_all(&self) -> Vec<u64> {
        self.doubled.iter().map(|d| d.div_ceil(2)).collect()
    }

    pub fn as_f64(&self, v: NodeId) -> f64 {
        self.doubled[v] as f64 / 2.0
    }
}

impl Serialize for HalfDistances {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = ser.serialize_seq(Some(self.doubled.len()))?;
        for &d in &self.doubled {
            if d == UNREACHABLE {
                seq.serialize_element("UNREACHABLE")?;
            } else if d % 2 == 0 {
                seq.serialize_element(&(d / 2))?;
            } else {
                seq.serialize_element(&(d as f64 / 2.0))?;
            }
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(tail: NodeId, head: NodeId, weight: u64) -> Edge {
        Edge { tail, head, weight }
    }

    #[test]
    fn rejects_bad_endpoints_and_weights() {
        assert!(WeightedDigraph::new(2, vec![e(0, 2, 1)], 1, 0).is_err());
        assert!(WeightedDigraph::new(2, vec![e(0, 1, 5)], 4, 0).is_err());
        assert!(WeightedDigraph::new(2, vec![e(0, 1, 4)], 4, 3).is_err());
        assert!(WeightedDigraph::new(2, vec![e(1, 1, 0), e(0, 1, 4)], 4, 0).is_ok());
    }

    #[test]
    fn adjacency_matches_edges() {
        let g = WeightedDigraph::new(3, vec![e(0, 1, 2), e(1, 2, 3), e(0, 2, 9)], 9, 0).unwrap();
        assert_eq!(g.out_edges(0), &[(1, 2), (2, 9)]);
        assert_eq!(g.in_edges(2), &[(1, 3), (0, 9)]);
        assert!(g.in_edges(0).is_empty());
    }

    #[test]
    fn digraph_text_round_trip_is_bit_exact() {
        let text = "3 2 0 3\n0 1 2\n1 2 3\n";
        let g = WeightedDigraph::from_text(text).unwrap();
        assert_eq!(g.to_text(), text);
        assert!(WeightedDigraph::from_text("3 2 0 3\n0 1 2\n").is_err());
        assert!(WeightedDigraph::from_text("3 1 0 3\n0 1 x\n").is_err());
    }

    #[test]
    fn network_text_round_trip_and_mirror() {
        let text = "4 3\n0 1\n1 2\n1 3\n";
        let net = CommNetwork::from_text(text).unwrap();
        assert_eq!(net.to_text(), text);
        for p in 0..net.adjacency_len() {
            assert_eq!(net.mirror(net.mirror(p)), p);
        }
        assert_eq!(net.hop_diameter(), 2);
    }

    #[test]
    fn disconnected_network_rejected() {
        assert!(CommNetwork::new(3, &[(0, 1)]).is_err());
        assert!(CommNetwork::new(1, &[]).is_ok());
    }

    #[test]
    fn half_distances_serialize_with_halves() {
        let h = HalfDistances { doubled: vec![0, 3, 8, UNREACHABLE] };
        assert_eq!(serde_json::to_string(&h).unwrap(), r#"[0,1.5,4,"UNREACHABLE"]"#);
        assert_eq!(h.ceil(1), 2);
        let d = DistanceVector::new(vec![0, UNREACHABLE], Kind::Exact);
        assert_eq!(serde_json::to_string(&d).unwrap(), r#"[0,"UNREACHABLE"]"#);
    }
}
