use bcast_sssp::auxiliary::validate::{validate_domination, validate_half_approximation};
use bcast_sssp::auxiliary::{auxiliary_sssp, AuxParams, Backend};
use bcast_sssp::engine::{RoundLedger, Word};
use bcast_sssp::generate::{generate_instance, with_zeroed_weights, InstanceSpec, Model};
use bcast_sssp::graph::{CommNetwork, HalfDistances, WeightedDigraph, UNREACHABLE};
use bcast_sssp::oracle::{bfs_hops, dijkstra, hop_limited};
use bcast_sssp::primitives::bellman_ford::distributed_bellman_ford;
use bcast_sssp::primitives::bounded_hop::{bounded_hop_approx, multi_source_bounded_hop_approx};
use bcast_sssp::scaling::{combine, scale_down, exact_sssp, local_conditions, reweight, verify_sssp, ExactParams, Variant};
use bcast_sssp::tree::{build_bfs_tree, pipeline_rounds, pipelined_broadcast};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = (CommNetwork, WeightedDigraph)> {
    (2usize..40, 1u64..12, prop::sample::select(vec![0u64, 1, 7, 1024]), 0usize..3, any::<u64>()).prop_filter_map(
        "infeasible spec",
        |(n, t, w, m, seed)| {
            let spec = InstanceSpec { n, target_diameter: t.min(n as u64 - 1), weight_max: w, model: Model::ALL[m], seed };
            generate_instance(&spec).ok()
        },
    )
}

fn sandwich_ok(lo: &[u64], got: &[u64], hi: &[u64], k: u64) -> bool {
    lo.iter().zip(got).zip(hi).all(|((&l, &g), &h)| {
        l <= g && (h == UNREACHABLE || g as u128 * k as u128 <= h as u128 * (k as u128 + 1))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn bellman_ford_matches_hop_oracle((net, g) in instance(), h in 1u64..12) {
        let mut l = RoundLedger::new(g.node_count());
        let d = distributed_bellman_ford(&net, &g, g.source(), h, &mut l).unwrap();
        prop_assert_eq!(d.values, hop_limited(&g, g.source(), h).unwrap().values);
        prop_assert!(l.rounds <= h + 2);
        prop_assert!(l.max_node_broadcasts() <= h);
        prop_assert!(l.is_consistent());
    }

    #[test]
    fn bounded_hop_sandwich((net, g) in instance(), h in 1u64..10, k in 1u64..5, frac in 0.0f64..0.6, seed in any::<u64>()) {
        let g = with_zeroed_weights(&g, frac, seed);
        let mut l = RoundLedger::new(g.node_count());
        let d = bounded_hop_approx(&net, &g, g.source(), h, k, &mut l).unwrap();
        let lo = dijkstra(&g, g.source()).values;
        let hi = hop_limited(&g, g.source(), h).unwrap().values;
        prop_assert!(sandwich_ok(&lo, &d.values, &hi, k));
        prop_assert!(l.is_consistent());
    }

    #[test]
    fn multi_source_rows_equal_single_source_runs((net, g) in instance(), h in 1u64..8, seed in any::<u64>()) {
        let n = g.node_count();
        let sources: Vec<usize> = (0..n).filter(|v| v % 3 == 0).collect();
        let mut l = RoundLedger::new(n);
        let rows = multi_source_bounded_hop_approx(&net, &g, &sources, h, 2, seed, &mut l).unwrap();
        for (row, &x) in rows.iter().zip(&sources) {
            let gx = g.with_source(x).unwrap();
            let mut l1 = RoundLedger::new(n);
            let single = bounded_hop_approx(&net, &gx, x, h, 2, &mut l1).unwrap();
            prop_assert_eq!(&row.values, &single.values);
        }
        prop_assert!(l.is_consistent());
    }

    #[test]
    fn exact_equals_dijkstra((net, g) in instance(), v2 in any::<bool>(), seed in any::<u64>()) {
        let variant = if v2 { Variant::V2 } else { Variant::V1 };
        let mut l = RoundLedger::new(g.node_count());
        let params = ExactParams { frame_checks: true, ..ExactParams::new(variant, seed) };
        let out = exact_sssp(&net, &g, params, &mut l).unwrap();
        prop_assert_eq!(out.dist.values, dijkstra(&g, g.source()).values);
        prop_assert!(l.is_consistent());
    }

    #[test]
    fn auxiliary_contract((net, g) in instance(), h in 1u64..12, blc in any::<bool>(), seed in any::<u64>()) {
        let n = g.node_count();
        let mut l = RoundLedger::new(n);
        let tree = build_bfs_tree(&net, 0, &mut l).unwrap();
        let backend = if blc { Backend::Blc { h_prime: 2 } } else { Backend::Dijkstra };
        let params = AuxParams { h: h.min(n as u64), backend };
        match auxiliary_sssp(&net, &tree, &g, params, seed, true, &mut l) {
            Ok(o) => {
                prop_assert!(validate_half_approximation(&dijkstra(&g, g.source()).values, &o.d_hat));
                prop_assert!(validate_domination(&g, &o.d_hat).ok);
            }
            Err(e) => prop_assert!(e.is_retryable(), "{}", e),
        }
    }

    #[test]
    fn reweighting_with_scaled_potentials_telescopes((_net, g) in instance()) {
        let exact = dijkstra(&g, g.source()).values;
        let delta = (g.node_count() as u64 * g.max_weight()).max(1);
        let (g_hat, shift) = scale_down(&g, delta);
        // Exact scaled distances dominate and sit inside the factor-two band.
        let d = HalfDistances { doubled: dijkstra(&g_hat, g.source()).values.iter().map(|&x| 2 * x).collect() };
        let gp = reweight(&g, &d, shift).unwrap();
        let dp = dijkstra(&gp, g.source()).values;
        prop_assert_eq!(combine(&dp, &d, shift), exact);
    }

    #[test]
    fn verification_accepts_truth_and_rejects_perturbations((net, g) in instance(), pick in any::<prop::sample::Index>(), up in any::<bool>()) {
        let n = g.node_count();
        let mut l = RoundLedger::new(n);
        let tree = build_bfs_tree(&net, 0, &mut l).unwrap();
        let exact = dijkstra(&g, g.source()).values;
        prop_assert!(verify_sssp(&net, &tree, &g, &exact, &mut l));
        let mut bad = exact.clone();
        let v = pick.index(n);
        if up { bad[v] += 1 } else if bad[v] > 0 { bad[v] -= 1 } else { bad[v] += 3 }
        let accepted = verify_sssp(&net, &tree, &g, &bad, &mut l);
        prop_assert_eq!(accepted, local_conditions(&g, &bad).iter().all(|&b| b));
        prop_assert!(!accepted);
    }

    #[test]
    fn pipelined_broadcast_reaches_everyone((net, _g) in instance(), k in 0usize..30, seed in any::<u64>()) {
        let n = net.node_count();
        let mut l = RoundLedger::new(n);
        let tree = build_bfs_tree(&net, 0, &mut l).unwrap();
        let before = l.rounds;
        let words: Vec<_> = (0..k).map(|i| {
            let origin = (seed as usize).wrapping_add(i * 7) % n;
            (origin, Word::new(origin, i as u64, 0))
        }).collect();
        let got = pipelined_broadcast(&tree, &words, &mut l, "test");
        prop_assert_eq!(got.len(), k);
        prop_assert!(l.rounds - before <= pipeline_rounds(k as u64, tree.height));
        prop_assert!(tree.height <= *bfs_hops(&net, 0).iter().max().unwrap());
    }

    #[test]
    fn text_round_trip((net, g) in instance()) {
        let g2 = WeightedDigraph::from_text(&g.to_text()).unwrap();
        prop_assert_eq!(g2.edges(), g.edges());
        prop_assert_eq!(g2.source(), g.source());
        let net2 = CommNetwork::from_text(&net.to_text()).unwrap();
        prop_assert_eq!(net2.links(), net.links());
    }
}
