use proptest::prelude::*;
use tripack_core::matching::{blossom_matchings_by_size, max_weight_matching_free, subset_dp, WeightedGraph};
use tripack_core::oracle::{opt_matching_size_p, OracleLimits};
use tripack_core::rational::ratio;

fn graph_strategy() -> impl Strategy<Value = WeightedGraph> {
    (0usize..=12).prop_flat_map(|m| {
        let pairs = m * m.saturating_sub(1) / 2;
        (
            Just(m),
            prop::collection::vec((any::<bool>(), -12i64..=12, 1i64..=3), pairs),
            0u8..4,
        )
            .prop_map(|(m, raw, density)| {
                let mut g = WeightedGraph::new(m);
                let mut it = raw.into_iter();
                for u in 0..m {
                    for v in (u + 1)..m {
                        let (keep, num, den) = it.next().unwrap();
                        // density 0 keeps every edge, higher values drop more
                        if density == 0 || keep || density == 1 {
                            if density == 3 && num % 2 == 0 {
                                continue;
                            }
                            g.set(u, v, ratio(num, den));
                        }
                    }
                }
                g
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn blossom_matches_enumeration(g in graph_strategy()) {
        let limits = OracleLimits::default();
        let sweep = blossom_matchings_by_size(&g).expect("certificate holds");
        let dp = subset_dp::max_weight_by_size(&g).unwrap();
        prop_assert_eq!(sweep.len(), dp.len());
        for (k, r) in sweep.iter().enumerate() {
            prop_assert_eq!(r.matching.len(), k);
            prop_assert_eq!(g.matching_cost(&r.matching).unwrap(), r.total_cost.clone());
            prop_assert_eq!(&r.total_cost, &dp[k].total_cost);
            prop_assert_eq!(r.total_cost.clone(), opt_matching_size_p(&g, k, &limits).unwrap());
        }
        prop_assert!(opt_matching_size_p(&g, sweep.len(), &limits).is_err());
        let free = max_weight_matching_free(&g).unwrap();
        let best = sweep.iter().map(|r| r.total_cost.clone()).max().unwrap();
        prop_assert_eq!(&free.total_cost, &best);
        for &(u, v) in free.matching.edges() {
            prop_assert!(*g.cost(u, v).unwrap() >= ratio(0, 1));
        }
    }
}
