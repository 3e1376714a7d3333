//! Positive-weight lift for approximate bounded-hop distances.
//!
//! With `k = 1/ε`, every weight becomes `(k + 1)·n·w + 1`. A shortest path of
//! at most `n - 1` edges then gains less than one unit of original weight,
//! and [`Lift::unscale`] maps lifted estimates back while keeping both the
//! lower bound and the `(1 + ε)` upper bound.

use crate::error::{Error, Result};
use crate::graph::{Edge, WeightedDigraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lift {
    /// `1/ε`.
    pub k: u64,
    pub n: u64,
}

impl Lift {
    pub fn new(n: usize, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("1/ε must be a positive integer".into()));
        }
        Ok(Self { k, n: n as u64 })
    }

    /// `(k + 1)·n`, the per-unit stretch.
    pub fn factor(&self) -> Result<u64> {
        (self.k + 1)
            .checked_mul(self.n)
            .ok_or_else(|| Error::Overflow("lift factor (1 + 1/ε)·n".into()))
    }

    pub fn lift(&self, w: u64) -> Result<u64> {
        self.factor()?
            .checked_mul(w)
            .and_then(|x| x.checked_add(1))
            .ok_or_else(|| Error::Overflow(format!("lifted weight of {w}")))
    }

    /// `⌊ε·⌊d / ((1 + ε)·n)⌋⌋` for an integer lifted estimate `d`.
    pub fn unscale(&self, d: u64) -> u64 {
        self.unscale_ratio(d as u128, 1)
    }

    /// [`unscale`](Self::unscale) for the rational estimate `num / den`.
    pub fn unscale_ratio(&self, num: u128, den: u128) -> u64 {
        let k = self.k as u128;
        let steps = num * k / (den * (k + 1) * self.n as u128);
        (steps / k) as u64
    }
}

/// Lifts every weight of `g`; the result's bound is the lift of `W`.
pub fn lift_weights(g: &WeightedDigraph, k: u64) -> Result<(WeightedDigraph, Lift)> {
    let lift = Lift::new(g.node_count(), k)?;
    let w_max = lift.lift(g.max_weight())?;
    let edges = g
        .edges()
        .iter()
        .map(|e| Ok(Edge { weight: lift.lift(e.weight)?, ..*e }))
        .collect::<Result<Vec<_>>>()?;
    Ok((WeightedDigraph::new(g.node_count(), edges, w_max, g.source())?, lift))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_nodes_unit_epsilon() {
        let l = Lift::new(3, 1).unwrap();
        assert_eq!(l.lift(0).unwrap(), 1);
        assert_eq!(l.unscale(1), 0);
        assert_eq!(l.lift(2).unwrap(), 13);
        // Path with weights {0, 2}: 1 + 13 lifted.
        assert_eq!(l.unscale(14), 2);
    }

    #[test]
    fn half_epsilon() {
        let l = Lift::new(2, 2).unwrap();
        assert_eq!(l.lift(5).unwrap(), 31);
    }

    #[test]
    fn rejects_zero_inverse_and_overflow() {
        assert!(Lift::new(3, 0).is_err());
        let l = Lift::new(1 << 20, 1).unwrap();
        assert!(l.lift(u64::MAX >> 10).is_err());
    }

    #[test]
    fn lifted_graph_weights_positive() {
        let g = WeightedDigraph::new(
            2,
            vec![Edge { tail: 0, head: 1, weight: 0 }, Edge { tail: 1, head: 0, weight: 4 }],
            4,
            0,
        )
        .unwrap();
        let (lg, _) = lift_weights(&g, 1).unwrap();
        assert!(lg.edges().iter().all(|e| e.weight >= 1));
        assert_eq!(lg.max_weight(), 17);
    }
}
