//! Checks on auxiliary estimates `d̂`, held as doubled integers.

use crate::graph::{Edge, HalfDistances, WeightedDigraph, UNREACHABLE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DominationCheck {
    pub ok: bool,
    /// First edge, in edge-list order, with `d̂(v) > d̂(u) + w(u, v)`.
    pub violation: Option<Edge>,
}

/// True iff `d̂(v) ≤ d̂(u) + w(u, v)` for every edge.
pub fn validate_domination(g: &WeightedDigraph, d: &HalfDistances) -> DominationCheck {
    let violation = g.edges().iter().copied().find(|e| {
        let (du, dv) = (d.doubled[e.tail], d.doubled[e.head]);
        du != UNREACHABLE && (dv == UNREACHABLE || dv > du + 2 * e.weight)
    });
    DominationCheck { ok: violation.is_none(), violation }
}

/// True iff `½·dist(v) ≤ d̂(v) ≤ dist(v)` for every node, given exact `dist`.
pub fn validate_half_approximation(dist: &[u64], d: &HalfDistances) -> bool {
    dist.iter().zip(&d.doubled).all(|(&t, &dd)| {
        if t == UNREACHABLE {
            return dd == UNREACHABLE;
        }
        dd != UNREACHABLE && t <= dd && dd <= 2 * t
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::domination_counterexample;
    use crate::oracle::dijkstra;

    #[test]
    fn exact_distances_dominate() {
        let (_, g) = domination_counterexample();
        let exact = dijkstra(&g, 0).values;
        let d = HalfDistances { doubled: exact.iter().map(|x| 2 * x).collect() };
        assert!(validate_domination(&g, &d).ok);
        assert!(validate_half_approximation(&exact, &d));
    }

    #[test]
    fn halved_rounding_estimates_fail_on_u_to_v() {
        let (_, g) = domination_counterexample();
        let d = HalfDistances { doubled: vec![0, 28, 32] };
        let check = validate_domination(&g, &d);
        assert!(!check.ok);
        let e = check.violation.unwrap();
        assert_eq!((e.tail, e.head, e.weight), (1, 2, 1));
    }

    #[test]
    fn zero_estimates_dominate() {
        let (_, g) = domination_counterexample();
        assert!(validate_domination(&g, &HalfDistances::zeros(3)).ok);
    }

    #[test]
    fn half_approximation_bounds() {
        let dist = [0, 10, 7];
        assert!(validate_half_approximation(&dist, &HalfDistances { doubled: vec![0, 10, 14] }));
        assert!(!validate_half_approximation(&dist, &HalfDistances { doubled: vec![0, 9, 14] }));
        assert!(!validate_half_approximation(&dist, &HalfDistances { doubled: vec![0, 10, 15] }));
    }
}
