//! Values checked against independent computations: brute-force enumeration,
//! closed-form arithmetic done by hand, and a golden file.

use compound_align::channel::{sample_channel, CompoundScenario, Setting};
use compound_align::linear::{build_many_to_one_demo, build_theorem1_scheme};
use compound_align::rational::{
    box_size, build_bc_real_scheme, build_complex_ic_scheme, build_ic_scheme, build_ic_scheme_with, finite_n_dof,
    make_monomial_sets, verify_span_inclusion, IcOptions, MonomialDirection, PowerExponents,
};
use compound_align::sim::{default_power_grid, estimate_slope, q_function, zf_rate_sweep, Normalization};
use compound_align::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::{BTreeMap, BTreeSet};

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Every exponent vector with entries in `1..=bound` over `vars` variables, by plain counting.
fn brute_box(vars: usize, bound: u32) -> BTreeSet<Vec<u32>> {
    let total = (bound as usize).pow(vars as u32);
    (0..total)
        .map(|mut idx| {
            let mut v = vec![0u32; vars];
            for slot in v.iter_mut().rev() {
                *slot = (idx % bound as usize) as u32 + 1;
                idx /= bound as usize;
            }
            v
        })
        .collect()
}

fn as_vectors(members: &[MonomialDirection], vars: &[usize]) -> BTreeSet<Vec<u32>> {
    members.iter().map(|d| vars.iter().map(|&v| d.exponent_of(v)).collect()).collect()
}

#[test]
fn monomial_sets_match_brute_force_three_vars_n2() {
    let vars = [4usize, 9, 2];
    let (v, u) = make_monomial_sets(&vars, 2).unwrap();
    let mut sorted = vars.to_vec();
    sorted.sort_unstable();
    assert_eq!(as_vectors(v.members(), &sorted), brute_box(3, 2));
    assert_eq!(as_vectors(u.members(), &sorted), brute_box(3, 3));
    assert_eq!((v.len(), u.len()), (8, 27));
    assert_eq!(box_size(3, 3), 27);

    // t * V lands in U for every variable t, and the shifted vectors stay in the box.
    let u_box = brute_box(3, 3);
    for (i, &t) in sorted.iter().enumerate() {
        assert!(verify_span_inclusion(&MonomialDirection::var(t, 1), &v, &u));
        for e in brute_box(3, 2) {
            let mut shifted = e.clone();
            shifted[i] += 1;
            assert!(u_box.contains(&shifted));
        }
    }
    // A square is not a single-variable multiplier and escapes U from the top corner.
    let square = MonomialDirection::var(sorted[0], 1).mul(&MonomialDirection::var(sorted[0], 1));
    assert!(!verify_span_inclusion(&square, &v, &u));
}

#[test]
fn golden_ic_two_user_sets() {
    let golden: BTreeMap<String, Vec<String>> =
        serde_json::from_str(include_str!("golden/ic_k2_n1_sets.json")).unwrap();
    let ch = sample_channel(&CompoundScenario::ic(Setting::Real, vec![1, 1], 3)).unwrap();
    let (scheme, ledger) = build_ic_scheme(&ch, 1, &q(1, 10)).unwrap();
    assert!(ledger.all_pass());
    for set in &scheme.sets {
        assert_eq!(set.canonical(&scheme.registry), golden[&set.name], "set {}", set.name);
    }
}

#[test]
fn power_exponents_by_hand() {
    // m_n = 6, eps = 1/10: bound = 0.9 / 12.2 = 9/122, scale = 5.2 / 12.2 = 26/61.
    let p = PowerExponents::new(&BigInt::from(6), &q(1, 10));
    assert_eq!(p.bound, q(9, 122));
    assert_eq!(p.scale, q(26, 61));
    assert_eq!(&p.bound + &p.scale, q(1, 2));
}

#[test]
fn finite_dof_by_hand() {
    let eps = q(1, 10);
    // IC K=2, n=3: Gamma = 2, m_n = 1 + 9 + 16 = 26, streams 2 * 9.
    let ic = sample_channel(&CompoundScenario::ic(Setting::Real, vec![1, 1], 1)).unwrap();
    let (s, _) = build_ic_scheme(&ic, 3, &eps).unwrap();
    assert_eq!(finite_n_dof(&s), q(18, 26));
    // BC M=2, J=[1,3], n=2: Gamma = 6, m_n = 1 + 3^6 + 2^6 = 794; user 1 sends M = 2
    // sub-messages of 2^6 streams and user 2 sends (M-1) 2^6.
    let bc = sample_channel(&CompoundScenario::bc(Setting::Real, 2, vec![1, 3], 1)).unwrap();
    let (s, ledger) = build_bc_real_scheme(&bc, 2, &eps).unwrap();
    assert!(ledger.all_pass());
    assert_eq!(finite_n_dof(&s), q(192, 794));
}

#[test]
fn complex_ic_real_view_halves_dof() {
    let ch = sample_channel(&CompoundScenario::ic(Setting::Complex, vec![1, 1], 2)).unwrap();
    let (s, ledger) = build_complex_ic_scheme(&ch, 1, &q(1, 10)).unwrap();
    assert!(ledger.all_pass(), "{:?}", ledger.failures());
    // The 4-user real view has six distinct cross-link symbols: Re and Im of h12 and h21,
    // and Im of h11 and h22 coupling each real pair. m_n = 1 + 1 + 2^6, 4 real streams, halved.
    assert_eq!(finite_n_dof(&s), q(4, 2 * 66));
}

#[test]
fn injected_direct_link_collides() {
    let ch = sample_channel(&CompoundScenario::ic(Setting::Real, vec![1, 1], 4)).unwrap();
    let opts = IcOptions { inject_direct_link: true, ..IcOptions::default() };
    match build_ic_scheme_with(&ch, 1, &q(1, 10), opts) {
        Err(Error::Collision { .. }) => {}
        Ok((_, ledger)) => assert!(!ledger.all_pass()),
        Err(e) => panic!("unexpected error {e}"),
    }
}

#[test]
fn q_function_reference_values() {
    assert!((q_function(0.0) - 0.5).abs() < 1e-15);
    // statrs erfc is accurate to about 1e-11 here.
    assert!((q_function(1.0) - 0.158_655_253_931_457_05).abs() < 1e-10);
    assert!((q_function(3.0) - 0.001_349_898_031_630_094_6).abs() < 1e-12);
}

#[test]
fn slope_of_exact_log_rates() {
    let powers = default_power_grid();
    let rates: Vec<f64> = powers.iter().map(|p| 1.5 * p.log2() + 0.7).collect();
    let fit = estimate_slope(&rates, &powers, Normalization::Log2P).unwrap();
    assert!((fit.slope - 1.5).abs() < 1e-12);
    let fit = estimate_slope(&rates, &powers, Normalization::HalfLog2P).unwrap();
    assert!((fit.slope - 3.0).abs() < 1e-12);
    assert!(matches!(estimate_slope(&rates[..3], &powers[..3], Normalization::Log2P), Err(Error::DegenerateFit(_))));
}

#[test]
fn theorem1_gains_three_half_bits_per_decade_per_stream_pair() {
    let ch = sample_channel(&CompoundScenario::bc(Setting::Complex, 2, vec![1, 3], 9)).unwrap();
    let (scheme, _) = build_theorem1_scheme(&ch).unwrap();
    let sweep = zf_rate_sweep(&ch, &scheme, &[1e4, 1e5, 1e6, 1e7]).unwrap();
    assert!(sweep.max_residual_interference < 1e-18);
    // A tenfold power increase adds log2(10)/2 per real stream: 3 real streams over 1 slot.
    let gain = sweep.total_rates[3] - sweep.total_rates[2];
    assert!((gain - 1.5 * 10f64.log2()).abs() < 0.05, "gain {gain}");
}

#[test]
fn many_to_one_demo_reaches_five() {
    let mut scenario = CompoundScenario::ic(Setting::Real, vec![1, 1, 1, 1], 6);
    scenario.tx_antennas = 2;
    scenario.rx_antennas = 4;
    let ch = sample_channel(&scenario).unwrap();
    let (scheme, ledger) = build_many_to_one_demo(&ch).unwrap();
    assert!(ledger.all_pass(), "{:?}", ledger.failures());
    let sweep = zf_rate_sweep(&ch, &scheme, &default_power_grid()).unwrap();
    assert!((sweep.fit.slope - 5.0).abs() < 0.1, "slope {}", sweep.fit.slope);
}
