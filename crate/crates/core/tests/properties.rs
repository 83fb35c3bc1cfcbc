use compound_align::channel::{sample_channel, CompoundScenario, Setting};
use compound_align::dof::{dof_bc, dof_x};
use compound_align::rational::{
    box_size, build_ic_scheme, check_separability, finite_n_dof, make_monomial_sets, rational_from_decimal,
    verify_span_inclusion, MonomialDirection,
};
use compound_align::sim::{default_power_grid, estimate_slope, Normalization};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monomial_sets_are_distinct_and_nested(
        vars in proptest::collection::btree_set(0usize..50, 1..4),
        n in 1u32..4,
    ) {
        let vars: Vec<usize> = vars.into_iter().collect();
        let (v, u) = make_monomial_sets(&vars, n).unwrap();
        prop_assert!(v.pairwise_distinct() && u.pairwise_distinct());
        prop_assert_eq!(v.len() as u128, box_size(vars.len(), n));
        prop_assert_eq!(u.len() as u128, box_size(vars.len(), n + 1));
        for &t in &vars {
            prop_assert!(verify_span_inclusion(&MonomialDirection::var(t, 1), &v, &u));
        }
    }

    #[test]
    fn disjoint_variable_sets_separate(
        a in proptest::collection::btree_set(0usize..20, 1..3),
        b in proptest::collection::btree_set(20usize..40, 1..3),
        n in 1u32..3,
    ) {
        // Desired directions carry a variable the interference never uses.
        let a: Vec<usize> = a.into_iter().collect();
        let b: Vec<usize> = b.into_iter().collect();
        let (va, _) = make_monomial_sets(&a, n).unwrap();
        let (_, ub) = make_monomial_sets(&b, n).unwrap();
        let sep = check_separability(std::slice::from_ref(&va), std::slice::from_ref(&ub)).unwrap();
        prop_assert_eq!(sep.m_effective, (va.len() + ub.len() + 1) as u128);
    }

    #[test]
    fn slope_ignores_offsets_and_scales_with_rate(
        slope in 0.1f64..6.0,
        offset in -20.0f64..20.0,
        factor in 0.1f64..10.0,
    ) {
        let powers = default_power_grid();
        let rates: Vec<f64> = powers.iter().map(|p| slope * p.log2() + offset).collect();
        let base = estimate_slope(&rates, &powers, Normalization::Log2P).unwrap().slope;
        let scaled: Vec<f64> = rates.iter().map(|r| r * factor).collect();
        let s = estimate_slope(&scaled, &powers, Normalization::Log2P).unwrap().slope;
        prop_assert!((base - slope).abs() < 1e-9);
        prop_assert!((s - factor * slope).abs() < 1e-8);
    }

    #[test]
    fn decimal_parsing_is_exact(num in 1i64..1_000_000, places in 0u32..6) {
        let den = 10i64.pow(places);
        let x: f64 = format!("{}", num as f64 / den as f64).parse().unwrap();
        let r = rational_from_decimal(x).unwrap();
        prop_assert_eq!(r.clone(), BigRational::new(BigInt::from(num), BigInt::from(den)));
        prop_assert_eq!(r.to_f64().unwrap(), x);
    }

    #[test]
    fn dof_formulas_are_consistent(m in 1usize..8, n in 2usize..6) {
        prop_assert_eq!(dof_x(m, n), dof_x(n, m));
        let all_at_least_m = vec![m; n];
        prop_assert_eq!(dof_bc(m, &all_at_least_m, Setting::Real).unwrap(), dof_x(m, n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn finite_dof_increases_with_n(seed in 0u64..1000) {
        let ch = sample_channel(&CompoundScenario::ic(Setting::Real, vec![1, 1], seed)).unwrap();
        let eps = BigRational::new(BigInt::from(1), BigInt::from(10));
        let limit = BigRational::from_integer(BigInt::from(1));
        let mut prev = BigRational::from_integer(BigInt::from(0));
        for n in 1..6 {
            let (s, ledger) = build_ic_scheme(&ch, n, &eps).unwrap();
            prop_assert!(ledger.all_pass());
            let d = finite_n_dof(&s);
            prop_assert!(d > prev && d < limit);
            prev = d;
        }
    }
}
