//! Rational-dimension schemes for the real compound BC, X and interference
//! networks, and the real view of a complex interference network.

use super::{
    box_size, make_monomial_sets_capped, DirectionSet, Link, Message, MonomialDirection, PowerExponents, RationalKind,
    RationalScheme, ReceiverState, SIZE_LIMIT,
};
use crate::channel::{
    aux_stream, domain, stream_rng, ChannelRealization, CompoundScenario, EntrySymbols, Network, Setting, SymbolKind,
    SymbolRef,
};
use crate::error::{Error, Result};
use crate::ledger::{CheckKind, Relation, VerificationLedger};
use crate::linalg::{c, null_space, CMat, Field, RESIDUAL_TOL};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand_distr::{Distribution, StandardNormal};

fn coef(r: SymbolRef) -> MonomialDirection {
    MonomialDirection::var(r.symbol, r.sign)
}

fn require(ch: &ChannelRealization, network: Network, setting: Setting, what: &str) -> Result<()> {
    let s = &ch.scenario;
    s.validate()?;
    if s.network != network || s.setting != setting || s.rx_antennas != 1 || s.tx_antennas != 1 {
        return Err(Error::RegimeMismatch(format!(
            "{what} needs a single-antenna {setting:?} {network:?} network, got {:?} {:?}",
            s.setting, s.network
        )));
    }
    Ok(())
}

fn size_check(count: u128, cap: u128) -> Result<()> {
    if count > cap {
        return Err(Error::SizeLimit { size: count, cap });
    }
    Ok(())
}

fn big_pow(base: u32, exp: usize) -> BigInt {
    num_traits::pow(BigInt::from(base), exp)
}

fn link(
    scheme_registry: &crate::channel::VariableRegistry,
    receiver: usize,
    state: usize,
    message: usize,
    c: MonomialDirection,
) -> Link {
    let coefficient_text = c.canonical(scheme_registry);
    Link { receiver, state, message, coefficient: c, coefficient_text }
}

/// Real compound BC with `J1 < M <= J2`: user 1 gets `M` sub-messages on a
/// shared exponent-box set `V`, user 2 rides on powers of a fresh generator through
/// a beamformer that zero-forces every user-1 state.
pub fn build_bc_real_scheme(
    ch: &ChannelRealization,
    n: u32,
    epsilon: &BigRational,
) -> Result<(RationalScheme, VerificationLedger)> {
    build_bc_real_scheme_capped(ch, n, epsilon, SIZE_LIMIT)
}

pub fn build_bc_real_scheme_capped(
    ch: &ChannelRealization,
    n: u32,
    epsilon: &BigRational,
    cap: u128,
) -> Result<(RationalScheme, VerificationLedger)> {
    require(ch, Network::Bc, Setting::Real, "rational BC scheme")?;
    let s = &ch.scenario;
    if s.k_or_n != 2 {
        return Err(Error::RegimeMismatch(format!("rational BC scheme is for 2 users, got {}", s.k_or_n)));
    }
    let (m, j1, j2) = (s.m, s.j[0], s.j[1]);
    if !(j1 < m && m <= j2) {
        return Err(Error::RegimeMismatch(format!("rational BC scheme needs J1 < M <= J2, got M={m} J=[{j1},{j2}]")));
    }
    let mut registry = ch.registry.clone();
    let vars: Vec<usize> = (0..j2)
        .flat_map(|j| (0..m).map(move |a| (j, a)))
        .map(|(j, a)| ch.entry_symbols(1, j, 0, a).re.symbol)
        .collect();
    let (v, u) = make_monomial_sets_capped(&vars, n, cap)?;
    let gamma = v.vars.len();
    let g_count = (m as u128 - 1) * box_size(gamma, n);
    size_check(g_count, cap)?;

    let mut rows = CMat::zeros(j1, m);
    for j in 0..j1 {
        rows.set_row(j, &ch.channel(0, j).row(0));
    }
    let v2 = null_space(&rows, Field::Real, Some(1));
    let hp: Vec<SymbolRef> = (0..j2)
        .map(|j| {
            let val = (ch.channel(1, j) * &v2)[(0, 0)].re;
            registry.intern(&format!("hp[2].{}", j + 1), val, SymbolKind::Derived)
        })
        .collect();
    let g0_value: f64 = StandardNormal.sample(&mut stream_rng(s.seed, aux_stream(domain::GENERATOR, 0)));
    let g0 = registry.intern("G0", g0_value, SymbolKind::Auxiliary);
    let g = DirectionSet::powers("G", g0.symbol, g_count as u32);

    let sets = vec![v, u, g];
    let mut messages: Vec<Message> =
        (0..m).map(|i| Message { label: format!("W[1].{}", i + 1), tx: 0, set: 0, aligned_into: Some(1) }).collect();
    messages.push(Message { label: "W[2]".into(), tx: 0, set: 2, aligned_into: None });
    let mut links = Vec::new();
    let mut receivers = Vec::new();
    for j in 0..j1 {
        for i in 0..m {
            links.push(link(&registry, 0, j, i, coef(ch.entry_symbols(0, j, 0, i).re)));
        }
        receivers.push(ReceiverState { receiver: 0, state: j, desired: (0..m).collect() });
    }
    for (j, &h) in hp.iter().enumerate() {
        for i in 0..m {
            links.push(link(&registry, 1, j, i, coef(ch.entry_symbols(1, j, 0, i).re)));
        }
        links.push(link(&registry, 1, j, m, coef(h)));
        receivers.push(ReceiverState { receiver: 1, state: j, desired: vec![m] });
    }
    let m_n = 1 + big_pow(n + 1, gamma) + BigInt::from(m - 1) * big_pow(n, gamma);
    let scheme = RationalScheme {
        kind: RationalKind::Bc,
        n,
        gamma: vec![gamma],
        power: PowerExponents::new(&m_n, epsilon),
        registry,
        sets,
        messages,
        links,
        receivers,
        m_n,
        epsilon: epsilon.clone(),
        dof_divisor: 1,
        limit: BigRational::new(BigInt::from(2 * m - 1), BigInt::from(m)),
    };
    let mut ledger = scheme.verify();
    ledger.record("gamma", CheckKind::Cardinality, gamma as f64, Relation::Equal, (j2 * m) as f64);
    for j in 0..j1 {
        let h = ch.channel(0, j);
        let residual = (h * &v2).norm() / h.norm();
        ledger.record(
            format!("rx1.state{}.zf_residual", j + 1),
            CheckKind::ZeroForcingResidual,
            residual,
            Relation::Below,
            RESIDUAL_TOL,
        );
    }
    ledger.record_exact(
        "registry.values_distinct",
        CheckKind::Distinctness,
        usize::from(!scheme.registry.values_distinct()),
    );
    Ok((scheme, ledger))
}

/// Real compound X network with `M` transmitters and `N >= 2` receivers:
/// messages for receiver `j` share `V[j]`, built over every coefficient seen
/// by the other receivers.
pub fn build_x_scheme(
    ch: &ChannelRealization,
    n: u32,
    epsilon: &BigRational,
) -> Result<(RationalScheme, VerificationLedger)> {
    build_x_scheme_capped(ch, n, epsilon, SIZE_LIMIT)
}

pub fn build_x_scheme_capped(
    ch: &ChannelRealization,
    n: u32,
    epsilon: &BigRational,
    cap: u128,
) -> Result<(RationalScheme, VerificationLedger)> {
    require(ch, Network::X, Setting::Real, "rational X scheme")?;
    let s = &ch.scenario;
    let (m, big_n) = (s.m, s.k_or_n);
    if big_n < 2 {
        return Err(Error::RegimeMismatch("rational X scheme needs at least 2 receivers".into()));
    }
    let registry = ch.registry.clone();
    let mut sets = Vec::new();
    let mut gamma = Vec::new();
    for j in 0..big_n {
        let vars: Vec<usize> = (0..big_n)
            .filter(|&r| r != j)
            .flat_map(|r| (0..s.j[r]).flat_map(move |k| (0..m).map(move |i| (r, k, i))))
            .map(|(r, k, i)| ch.entry_symbols(r, k, 0, i).re.symbol)
            .collect();
        let (mut v, mut u) = make_monomial_sets_capped(&vars, n, cap)?;
        v.name = format!("V[{}]", j + 1);
        u.name = format!("U[{}]", j + 1);
        gamma.push(v.vars.len());
        sets.push(v);
        sets.push(u);
    }
    let msg = |j: usize, i: usize| j * m + i;
    let messages: Vec<Message> = (0..big_n)
        .flat_map(|j| (0..m).map(move |i| (j, i)))
        .map(|(j, i)| Message {
            label: format!("W[{},{}]", j + 1, i + 1),
            tx: i,
            set: 2 * j,
            aligned_into: Some(2 * j + 1),
        })
        .collect();
    let mut links = Vec::new();
    let mut receivers = Vec::new();
    for r in 0..big_n {
        for k in 0..s.j[r] {
            for i in 0..m {
                let c = coef(ch.entry_symbols(r, k, 0, i).re);
                for j in 0..big_n {
                    links.push(link(&registry, r, k, msg(j, i), c.clone()));
                }
            }
            receivers.push(ReceiverState { receiver: r, state: k, desired: (0..m).map(|i| msg(r, i)).collect() });
        }
    }
    let m_n = 1 + gamma
        .iter()
        .map(|&g| BigInt::from(m) * big_pow(n, g) + BigInt::from(big_n - 1) * big_pow(n + 1, g))
        .max()
        .unwrap_or_default();
    let scheme = RationalScheme {
        kind: RationalKind::X,
        n,
        power: PowerExponents::new(&m_n, epsilon),
        gamma: gamma.clone(),
        registry,
        sets,
        messages,
        links,
        receivers,
        m_n,
        epsilon: epsilon.clone(),
        dof_divisor: 1,
        limit: BigRational::new(BigInt::from(m * big_n), BigInt::from(m + big_n - 1)),
    };
    let mut ledger = scheme.verify();
    for (j, &g) in gamma.iter().enumerate() {
        let expected: usize = m * (0..big_n).filter(|&r| r != j).map(|r| s.j[r]).sum::<usize>();
        ledger.record(format!("gamma[{}]", j + 1), CheckKind::Cardinality, g as f64, Relation::Equal, expected as f64);
    }
    Ok((scheme, ledger))
}

/// Options for [`build_ic_scheme_with`].
#[derive(Debug, Clone, Copy)]
pub struct IcOptions {
    /// Adds receiver 1's first direct-link coefficient to the variables of `V`,
    /// which breaks separability on purpose.
    pub inject_direct_link: bool,
    pub size_cap: u128,
}

impl Default for IcOptions {
    fn default() -> Self {
        IcOptions { inject_direct_link: false, size_cap: SIZE_LIMIT }
    }
}

/// Real compound interference channel, `K >= 2`: one shared `V` over every
/// cross-link coefficient.
pub fn build_ic_scheme(
    ch: &ChannelRealization,
    n: u32,
    epsilon: &BigRational,
) -> Result<(RationalScheme, VerificationLedger)> {
    build_ic_scheme_with(ch, n, epsilon, IcOptions::default())
}

pub fn build_ic_scheme_with(
    ch: &ChannelRealization,
    n: u32,
    epsilon: &BigRational,
    opts: IcOptions,
) -> Result<(RationalScheme, VerificationLedger)> {
    require(ch, Network::Ic, Setting::Real, "rational IC scheme")?;
    let k = ch.scenario.k_or_n;
    if k < 2 {
        return Err(Error::RegimeMismatch("rational IC scheme needs at least 2 users".into()));
    }
    let limit = BigRational::new(BigInt::from(k), BigInt::from(2));
    let (scheme, mut ledger) = ic_core(ch, n, epsilon, opts, RationalKind::Ic, 1, limit)?;
    let expected = (k - 1) * ch.scenario.j.iter().sum::<usize>();
    ledger.record("gamma", CheckKind::Cardinality, scheme.gamma[0] as f64, Relation::Equal, expected as f64);
    Ok((scheme, ledger))
}

fn ic_core(
    ch: &ChannelRealization,
    n: u32,
    epsilon: &BigRational,
    opts: IcOptions,
    kind: RationalKind,
    dof_divisor: u32,
    limit: BigRational,
) -> Result<(RationalScheme, VerificationLedger)> {
    let k = ch.scenario.k_or_n;
    let states = &ch.scenario.j;
    let mut vars = Vec::new();
    for (j, &count) in states.iter().enumerate() {
        for st in 0..count {
            for i in (0..k).filter(|&i| i != j) {
                vars.push(ch.entry_symbols(j, st, 0, i).re.symbol);
            }
        }
    }
    let direct: Vec<usize> = (0..k)
        .flat_map(|j| (0..states[j]).map(move |st| (j, st)))
        .map(|(j, st)| ch.entry_symbols(j, st, 0, j).re.symbol)
        .collect();
    if opts.inject_direct_link {
        vars.push(direct[0]);
    }
    let (v, u) = make_monomial_sets_capped(&vars, n, opts.size_cap)?;
    let gamma = v.vars.len();
    let registry = ch.registry.clone();
    let messages: Vec<Message> =
        (0..k).map(|i| Message { label: format!("W[{}]", i + 1), tx: i, set: 0, aligned_into: Some(1) }).collect();
    let mut links = Vec::new();
    let mut receivers = Vec::new();
    for (j, &count) in states.iter().enumerate() {
        for st in 0..count {
            for i in 0..k {
                links.push(link(&registry, j, st, i, coef(ch.entry_symbols(j, st, 0, i).re)));
            }
            receivers.push(ReceiverState { receiver: j, state: st, desired: vec![j] });
        }
    }
    let m_n = 1 + big_pow(n, gamma) + big_pow(n + 1, gamma);
    let scheme = RationalScheme {
        kind,
        n,
        gamma: vec![gamma],
        power: PowerExponents::new(&m_n, epsilon),
        registry,
        sets: vec![v, u],
        messages,
        links,
        receivers,
        m_n,
        epsilon: epsilon.clone(),
        dof_divisor,
        limit,
    };
    let ledger = scheme.verify();
    Ok((scheme, ledger))
}

/// Real view of a complex interference channel: each complex user becomes two
/// real users (real and imaginary parts), and the coefficient `h` becomes the
/// block `[[Re h, -Im h], [Im h, Re h]]`. Entries reuse the complex registry's
/// symbols, with the sign of `-Im h` carried on the reference.
pub fn complex_ic_to_real_ic(ch: &ChannelRealization) -> Result<ChannelRealization> {
    require(ch, Network::Ic, Setting::Complex, "complex IC reduction")?;
    let k = ch.scenario.k_or_n;
    let j: Vec<usize> = ch.scenario.j.iter().flat_map(|&x| [x, x]).collect();
    let scenario = CompoundScenario::ic(Setting::Real, j.clone(), ch.scenario.seed);
    let mut coefficients = Vec::with_capacity(2 * k);
    let mut entries = Vec::with_capacity(2 * k);
    for (user, &count) in j.iter().enumerate() {
        let (cu, q) = (user / 2, user % 2);
        let mut rows = Vec::new();
        let mut syms = Vec::new();
        for st in 0..count {
            let h = ch.channel(cu, st);
            let mut row = CMat::zeros(1, 2 * k);
            let mut e = Vec::with_capacity(2 * k);
            for tx in 0..2 * k {
                let (ci, p) = (tx / 2, tx % 2);
                let z = h[(0, ci)];
                let es = ch.entry_symbols(cu, st, 0, ci);
                let im = es.im.expect("complex entries carry an imaginary symbol");
                let (value, sym) = match (q, p) {
                    (0, 0) | (1, 1) => (z.re, es.re),
                    (0, 1) => (-z.im, SymbolRef { symbol: im.symbol, sign: -im.sign }),
                    _ => (z.im, im),
                };
                row[(0, tx)] = c(value, 0.0);
                e.push(EntrySymbols { re: sym, im: None });
            }
            rows.push(row);
            syms.push(e);
        }
        coefficients.push(rows);
        entries.push(syms);
    }
    ChannelRealization::from_parts(scenario, ch.registry.clone(), coefficients, entries)
}

/// Runs the interference-channel scheme on the real view of a complex IC. DoF
/// are reported in complex units (half the real count).
pub fn build_complex_ic_scheme(
    ch: &ChannelRealization,
    n: u32,
    epsilon: &BigRational,
) -> Result<(RationalScheme, VerificationLedger)> {
    let real = complex_ic_to_real_ic(ch)?;
    let k = ch.scenario.k_or_n;
    let limit = BigRational::new(BigInt::from(k), BigInt::from(2));
    ic_core(&real, n, epsilon, IcOptions::default(), RationalKind::ComplexIc, 2, limit)
}
