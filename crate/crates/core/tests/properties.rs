use proptest::prelude::*;

use tripack_core::alg1::run_alg1_even;
use tripack_core::alg2::run_alg2_traced;
use tripack_core::alg3::run_alg3_traced;
use tripack_core::analysis::{check_lemma_suite, decompose, gather_inputs, normalize_pstar};
use tripack_core::bench::best_of_three;
use tripack_core::instance::{validate_packing, weight_of};
use tripack_core::io::{load_instance, save_instance};
use tripack_core::lpcert::{verify_dual, DualCertificate};
use tripack_core::matching::{max_weight_matchings_by_size, WeightedGraph};
use tripack_core::oracle::{opt_2star_packing, opt_3pp, OracleLimits};
use tripack_core::rational::{int, ratio, Rational};
use tripack_core::stars::{
    arcset_2star_packing, exact_2star_packing, max_weight_2feasible_arc_set, StarBackendChoice, DEFAULT_EXACT_LIMIT,
};
use tripack_core::{Instance, ThreePathPacking};

fn instance_of(n: usize, max_w: i64) -> impl Strategy<Value = Instance> {
    prop::collection::vec(0..=max_w, n * (n - 1) / 2).prop_map(move |ws| {
        let mut it = ws.into_iter();
        let mut rows = vec![vec![int(0); n]; n];
        for u in 0..n {
            for v in (u + 1)..n {
                let w = int(it.next().unwrap());
                rows[u][v] = w.clone();
                rows[v][u] = w;
            }
        }
        Instance::new(rows).unwrap()
    })
}

fn small_instance() -> impl Strategy<Value = Instance> {
    prop_oneof![instance_of(6, 20), instance_of(9, 20), instance_of(6, 1), instance_of(9, 1)]
}

fn edge_weight_sum(inst: &Instance, m: &[(usize, usize)]) -> Rational {
    m.iter().map(|&(u, v)| inst.weight(u, v).clone()).sum()
}

fn m_half_weight(inst: &Instance) -> Rational {
    let all = max_weight_matchings_by_size(&WeightedGraph::from_instance(inst)).unwrap();
    all[inst.n() / 2].total_cost.clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn packing_weight_bounds_and_additivity(inst in instance_of(9, 30), perm in Just((0..9).collect::<Vec<usize>>()).prop_shuffle()) {
        let p = ThreePathPacking::new(perm.chunks(3).map(|c| [c[0], c[1], c[2]]).collect());
        prop_assert!(validate_packing(&inst, &p).is_empty());
        let w = weight_of(&inst, &p).unwrap();
        prop_assert!(w >= int(0));
        prop_assert!(w <= inst.total_weight());
        let parts: Rational = p.paths.iter().map(|q| inst.path_weight(q)).sum();
        prop_assert_eq!(w, parts);
    }

    #[test]
    fn save_load_round_trip(n in prop::sample::select(vec![3usize, 6]), nums in prop::collection::vec((0i64..50, 1i64..7), 28)) {
        let mut it = nums.into_iter().cycle();
        let inst = Instance::from_fn(n, |_, _| {
            let (a, b) = it.next().unwrap();
            ratio(a, b)
        }).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        save_instance(&path, &inst).unwrap();
        prop_assert_eq!(load_instance(&path).unwrap(), inst);
    }

    #[test]
    fn matching_cost_monotone_in_size(inst in instance_of(9, 25)) {
        let all = max_weight_matchings_by_size(&WeightedGraph::from_instance(&inst)).unwrap();
        prop_assert_eq!(all.len(), 5);
        for k in 1..all.len() {
            prop_assert!(all[k].total_cost >= all[k - 1].total_cost);
        }
    }

    #[test]
    fn first_algorithm_bounds(inst in instance_of(6, 20)) {
        let t = run_alg1_even(&inst).unwrap();
        prop_assert!(validate_packing(&inst, &t.packing).is_empty());
        let w = weight_of(&inst, &t.packing).unwrap();
        prop_assert!(w >= &t.m_star_weight + &t.m_contracted_cost);
        let (pstar, opt) = opt_3pp(&inst, &OracleLimits::default()).unwrap();
        let sum_max: Rational = pstar.paths.iter().map(|p| inst.path_max_edge(p)).sum();
        let rhs = ratio(2, 3) * &t.m_star_weight + ratio(1, 2) * &opt - ratio(1, 2) * sum_max;
        prop_assert!(w >= rhs);
    }

    #[test]
    fn second_algorithm_bounds(inst in small_instance()) {
        let t = run_alg2_traced(&inst).unwrap();
        prop_assert!(validate_packing(&inst, &t.packing).is_empty());
        prop_assert!(t.m_free_cost >= int(0));
        prop_assert!(t.m_saturated_cost >= t.m_free_cost);
        let w = weight_of(&inst, &t.packing).unwrap();
        prop_assert!(w >= &t.m_star_weight + &t.m_free_cost);
    }

    #[test]
    fn star_packings(inst in small_instance()) {
        let n = inst.n();
        let t = run_alg3_traced(&inst, StarBackendChoice::exact()).unwrap();
        prop_assert!(validate_packing(&inst, &t.packing).is_empty());
        prop_assert!(t.arc_set.is_feasible(2));
        prop_assert!(t.stars.covers(&t.lg));
        prop_assert!(t.stars.single_edges() <= n / 3);
        prop_assert!((n / 3 - t.stars.single_edges()) % 3 == 0);
        prop_assert!(weight_of(&inst, &t.packing).unwrap() >= t.stars_weight);

        let exact = exact_2star_packing(&inst, &t.lg, DEFAULT_EXACT_LIMIT).unwrap();
        let arc = arcset_2star_packing(&inst, &t.lg).unwrap();
        prop_assert!(arc.covers(&t.lg));
        let (we, wa) = (weight_of(&inst, &exact).unwrap(), weight_of(&inst, &arc).unwrap());
        prop_assert!(we >= wa);
        prop_assert_eq!(&we, &opt_2star_packing(&inst, &t.lg, &OracleLimits::default()).unwrap());
        prop_assert!(int(3) * wa >= int(2) * &we);
        let (_, a_star) = max_weight_2feasible_arc_set(&inst, &t.lg);
        prop_assert!(a_star >= we);
    }

    #[test]
    fn oracle_dominates_and_half_matching(inst in small_instance()) {
        let (pstar, opt) = opt_3pp(&inst, &OracleLimits::default()).unwrap();
        prop_assert!(validate_packing(&inst, &pstar).is_empty());
        prop_assert_eq!(weight_of(&inst, &pstar).unwrap(), opt.clone());
        let b = best_of_three(&inst, StarBackendChoice::exact()).unwrap();
        for w in &b.weights {
            prop_assert!(*w <= opt);
        }
        prop_assert!(*b.best_weight() >= ratio(10, 17) * &opt);
        let third = max_weight_matchings_by_size(&WeightedGraph::from_instance(&inst)).unwrap()[inst.n() / 3]
            .total_cost
            .clone();
        if inst.n() % 2 == 0 {
            prop_assert!(m_half_weight(&inst) >= third);
        }
        prop_assert!(int(2) * third >= opt);
    }

    #[test]
    fn oracle_relabel_invariant(inst in instance_of(6, 20), perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle()) {
        let relabeled = Instance::from_fn(6, |u, v| inst.weight(perm[u], perm[v]).clone()).unwrap();
        let limits = OracleLimits::default();
        prop_assert_eq!(opt_3pp(&inst, &limits).unwrap().1, opt_3pp(&relabeled, &limits).unwrap().1);
    }

    #[test]
    fn scaled_certificate_stays_feasible(num in 0i64..=20, den in 1i64..=20) {
        prop_assume!(num <= den);
        let t = ratio(num, den);
        let mut cert = DualCertificate::builtin();
        for l in &mut cert.lambda {
            *l = &*l * &t;
        }
        let r = verify_dual(&cert);
        prop_assert!(r.feasible);
        prop_assert_eq!(r.objective, ratio(10, 17) * t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposition_partitions(inst in instance_of(9, 20)) {
        let limits = OracleLimits::default();
        let (pstar, opt) = opt_3pp(&inst, &limits).unwrap();
        let m = run_alg2_traced(&inst).unwrap().m_star;
        let normalized = normalize_pstar(&inst, &pstar, &m).unwrap();
        prop_assert_eq!(weight_of(&inst, &normalized).unwrap(), opt.clone());
        let d = decompose(&inst, &normalized, &m).unwrap();
        prop_assert!(d.invariant_violations(&m).is_empty(), "{:?}", d.invariant_violations(&m));
        let class_total: Rational = (1..=8).map(|c| d.class_weight(&inst, c)).sum();
        prop_assert_eq!(class_total, opt);
        let m_total: Rational = d.m_parts.iter().map(|part| edge_weight_sum(&inst, part)).sum();
        prop_assert_eq!(m_total, edge_weight_sum(&inst, m.edges()));
        let m1_total: Rational = d.m1_parts.iter().map(|part| edge_weight_sum(&inst, part)).sum();
        prop_assert_eq!(m1_total, edge_weight_sum(&inst, &d.m_parts[0]));
    }

    #[test]
    fn lemma_suite_and_lp_point(inst in small_instance()) {
        let inputs = gather_inputs(&inst, &OracleLimits::default(), StarBackendChoice::exact()).unwrap();
        let report = check_lemma_suite(&inst, &inputs).unwrap();
        if report.skipped.is_none() {
            prop_assert!(report.lp_violations.is_empty(), "{:?}", report.lp_violations);
            prop_assert!(report.all_pass(), "{:?}", report.failures());
        }
    }
}
