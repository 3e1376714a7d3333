//! Result records shared by the CLI and the acceptance suite.

use serde::Serialize;

use crate::engine::RoundLedger;
use crate::graph::{CommNetwork, WeightedDigraph};

/// One algorithm run in the JSON shape printed by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "D")]
    pub diameter: u64,
    #[serde(rename = "W")]
    pub max_weight: u64,
    pub variant: String,
    pub h: Option<u64>,
    pub h_prime: Option<u64>,
    pub rounds: u64,
    pub total_words: u64,
    pub scaling_calls: u32,
    pub retries: u32,
    pub verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Rounds per named phase.
    pub phases: std::collections::BTreeMap<String, u64>,
    pub distances: serde_json::Value,
}

impl RunReport {
    pub fn new(net: &CommNetwork, g: &WeightedDigraph, variant: &str, ledger: &RoundLedger, distances: impl Serialize) -> Self {
        Self {
            n: g.node_count(),
            m: g.edge_count(),
            diameter: net.hop_diameter(),
            max_weight: g.max_weight(),
            variant: variant.to_string(),
            h: None,
            h_prime: None,
            rounds: ledger.rounds,
            total_words: ledger.total_words,
            scaling_calls: 0,
            retries: 0,
            verified: None,
            epsilon: None,
            phases: ledger.phases.clone(),
            distances: serde_json::to_value(distances).expect("plain data serializes"),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

pub const CSV_HEADER: &str = "n,D,W,variant,h,h_prime,rounds_median,words_median,verified_all";

/// One sweep cell summarised over its repetitions.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub diameter: u64,
    pub max_weight: u64,
    pub variant: String,
    pub h: u64,
    pub h_prime: Option<u64>,
    pub rounds_median: f64,
    pub words_median: f64,
    pub verified_all: bool,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.diameter,
            self.max_weight,
            self.variant,
            self.h,
            self.h_prime.map(|x| x.to_string()).unwrap_or_default(),
            self.rounds_median,
            self.words_median,
            self.verified_all
        )
    }
}

/// Median of a non-empty sample; the mean of the middle pair for even sizes.
pub fn median(xs: &[u64]) -> f64 {
    assert!(!xs.is_empty(), "median of an empty sample");
    let mut v = xs.to_vec();
    v.sort_unstable();
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m] as f64
    } else {
        (v[m - 1] as f64 + v[m] as f64) / 2.0
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
