//! Random hitting sets for families of large sets.
//!
//! Sampling each of `s` elements with probability `min(x/q, 1)`, where
//! `x = c·ln(k·s) + 1`, hits each of `k` fixed sets of size at least `q`
//! with probability at least `1 - 1/s^c`, and the sample has at most
//! `3xs/q` elements with the same probability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct HittingSet {
    pub members: Vec<usize>,
    pub p: f64,
    pub x: f64,
}

impl HittingSet {
    /// The size bound `3xs/q` that holds with high probability when `p < 1`.
    pub fn size_bound(&self, universe: usize, q: u64) -> f64 {
        3.0 * self.x * universe as f64 / q as f64
    }
}

pub fn sampling_rate(universe: usize, q: u64, k_sets: u64, c: f64) -> (f64, f64) {
    let x = c * ((k_sets as f64) * (universe as f64)).ln() + 1.0;
    (x, (x / q as f64).min(1.0))
}

pub fn sample_hitting_set(universe: usize, q: u64, k_sets: u64, c: f64, seed: u64) -> Result<HittingSet> {
    if q == 0 {
        return Err(Error::InvalidParameter("set size q must be at least 1".into()));
    }
    let (x, p) = sampling_rate(universe, q, k_sets.max(1), c);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let members = (0..universe).filter(|_| p >= 1.0 || rng.gen_bool(p)).collect();
    Ok(HittingSet { members, p, x })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_q_takes_everything() {
        let t = sample_hitting_set(50, 2, 10, 1.0, 3).unwrap();
        assert_eq!(t.p, 1.0);
        assert_eq!(t.members, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn rate_for_large_family() {
        let (x, p) = sampling_rate(1000, 100, 1_000_000, 1.0);
        assert!((x - 21.723).abs() < 1e-3, "{x}");
        assert!((p - 0.21723).abs() < 1e-5, "{p}");
    }

    #[test]
    fn rejects_zero_q() {
        assert!(sample_hitting_set(5, 0, 1, 1.0, 0).is_err());
    }
}
