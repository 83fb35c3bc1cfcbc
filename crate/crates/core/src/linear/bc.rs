//! Two-user compound broadcast constructions.
//!
//! Each user's combiners are chosen first so that the transmit-side images
//! `H_j^T C_j` of all its states collapse into a small protected space; the
//! other user's beamformers then span the orthogonal complement of that space.

use super::{
    network_for, protected_basis, protected_rank, protected_space, verify_on_network, LinearNetwork, LinearScheme,
    SchemeKind,
};
use crate::channel::{aux_stream, domain, stream_rng, ChannelRealization};
use crate::error::{Error, Result};
use crate::ledger::{CheckKind, Relation, VerificationLedger};
use crate::linalg::{
    c, column_rank_ratio, eigenvalues, eigenvector, hstack, identity, imag_fraction, inverse, normalize_columns,
    null_space, numerical_rank, random_matrix, sigma_ratio, solve, CMat, Field, RANK_TOL, RESIDUAL_TOL,
};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Channel family for the MIMO broadcast examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MimoBcChannel {
    /// I.i.d. complex entries, complex beamforming.
    ComplexGeneric,
    /// I.i.d. real entries, real beamforming; eigenvalue reality is not guaranteed.
    RealGeneric,
    /// Real embedding (and extension) of the complex MISO model.
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeingartenCombiners {
    /// Column selections of `I_5` (user 1) and the 5-point DFT (user 2).
    IdentityDft,
    /// I.i.d. complex combiners.
    Random,
}

/// `[H_1^T H_2^T]`, required square and invertible.
fn stacked_pair(hs: &[CMat]) -> Result<CMat> {
    let s = hstack(&[&hs[0].transpose(), &hs[1].transpose()]);
    if s.nrows() != s.ncols() {
        return Err(Error::DimensionMismatch(format!("stacked pair is {}x{}, must be square", s.nrows(), s.ncols())));
    }
    let ratio = sigma_ratio(&s);
    if ratio <= RANK_TOL {
        return Err(Error::SingularStack { ratio });
    }
    Ok(s)
}

/// `[B1 B3; B2 B4] = [H_1^T H_2^T]^{-1} [H_3^T H_4^T]`.
fn eigen_blocks(hs: &[CMat]) -> Result<[CMat; 4]> {
    let rx = hs[0].nrows();
    let s = stacked_pair(hs)?;
    let rhs = hstack(&[&hs[2].transpose(), &hs[3].transpose()]);
    let x = solve(&s, &rhs).ok_or(Error::SingularStack { ratio: 0.0 })?;
    let block = |r: usize, k: usize| x.view((r * rx, k * rx), (rx, rx)).into_owned();
    Ok([block(0, 0), block(1, 0), block(0, 1), block(1, 1)])
}

/// `B1^{-1} B3 B4^{-1} B2`, whose invariant subspaces carry the aligned combiners.
fn eigen_product(b: &[CMat; 4]) -> Result<(CMat, CMat)> {
    let inv = |m: &CMat, name: &str| {
        inverse(m).ok_or_else(|| {
            Error::GenericityViolation(format!("{name} is singular (sigma ratio {:.3e})", sigma_ratio(m)))
        })
    };
    let b1_inv = inv(&b[0], "B1")?;
    let b3_inv = inv(&b[2], "B3")?;
    let b4_inv = inv(&b[3], "B4")?;
    Ok((&b1_inv * &b[2] * &b4_inv * &b[1], b3_inv))
}

/// Picks `d` eigenvalues: real ones only in the real field, then the pair
/// with the largest separation (largest magnitude when `d == 1`).
fn select_eigenvalues(values: &[Complex64], d: usize, field: Field) -> Result<Vec<Complex64>> {
    let usable: Vec<Complex64> =
        values.iter().copied().filter(|l| field == Field::Complex || l.im.abs() < 1e-9 * l.norm()).collect();
    if usable.len() < d {
        return Err(Error::NoRealEigenvectors { found: usable.len(), needed: d });
    }
    let mut by_mag = usable.clone();
    by_mag.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap());
    if d != 2 {
        return Ok(by_mag.into_iter().take(d).collect());
    }
    let mut best = (0, 1, -1.0);
    for a in 0..usable.len() {
        for b in a + 1..usable.len() {
            let gap = (usable[a] - usable[b]).norm();
            if gap > best.2 {
                best = (a, b, gap);
            }
        }
    }
    Ok(vec![usable[best.0], usable[best.1]])
}

/// Combiners for one user whose `J` states must occupy as few transmit dimensions as possible.
fn aligned_combiners<R: Rng>(hs: &[CMat], d: usize, field: Field, rng: &mut R) -> Result<Vec<CMat>> {
    let rx = hs[0].nrows();
    let mut combiners = match hs.len() {
        1 => vec![identity(rx).columns(0, d).into_owned()],
        3 => {
            let v3 = random_matrix(rng, rx, d, field);
            let s = stacked_pair(hs)?;
            let x = solve(&s, &(hs[2].transpose() * &v3)).ok_or(Error::SingularStack { ratio: 0.0 })?;
            vec![x.rows(0, rx).into_owned(), x.rows(rx, rx).into_owned(), v3]
        }
        4 => {
            let b = eigen_blocks(hs)?;
            let (a, b3_inv) = eigen_product(&b)?;
            let chosen = select_eigenvalues(&eigenvalues(&a), d, field)?;
            let cols: Vec<CMat> = chosen.iter().map(|&l| eigenvector(&a, l, field)).collect();
            let refs: Vec<&CMat> = cols.iter().collect();
            let v3 = hstack(&refs);
            let v1 = &b[0] * &v3;
            let v2 = &b[1] * &v3;
            let v4 = &b3_inv * &v1;
            vec![v1, v2, v3, v4]
        }
        j => return Err(Error::Unsupported(format!("alignment over {j} states"))),
    };
    for m in &mut combiners {
        normalize_columns(m);
    }
    Ok(combiners)
}

/// Beamformers of each user: the smallest right singular vectors of the other
/// user's protected space (transposed), i.e. its orthogonal complement.
fn complement_beamformers(net: &LinearNetwork, combiners: &[Vec<CMat>], streams: &[usize]) -> Vec<CMat> {
    (0..2)
        .map(|k| {
            let other = 1 - k;
            let p = protected_space(net, &combiners[other], other);
            null_space(&p.transpose(), net.field, Some(streams[k]))
        })
        .collect()
}

fn aux_rng(ch: &ChannelRealization, user: usize) -> rand_chacha::ChaCha20Rng {
    stream_rng(ch.scenario.seed, aux_stream(domain::BEAMFORMING, user as u64))
}

fn build_two_user(
    kind: SchemeKind,
    ch: &ChannelRealization,
    streams: [usize; 2],
) -> Result<(LinearScheme, VerificationLedger)> {
    let net = network_for(kind, ch)?;
    let mut combiners = Vec::with_capacity(2);
    for (k, &d) in streams.iter().enumerate() {
        combiners.push(aligned_combiners(&net.channels[k], d, net.field, &mut aux_rng(ch, k))?);
    }
    let beamformers = complement_beamformers(&net, &combiners, &streams);
    let scheme = LinearScheme::new(kind, &net, beamformers, combiners);
    let ledger = verify_on_network(&net, &scheme)?;
    Ok((scheme, ledger))
}

/// Asymmetric complex signaling for the complex MISO BC with M=2, J=[1,3]:
/// 2 real streams to user 1 and 1 to user 2 over 2x4 real channels, 3/2 DoF.
pub fn build_theorem1_scheme(ch: &ChannelRealization) -> Result<(LinearScheme, VerificationLedger)> {
    build_two_user(SchemeKind::Theorem1, ch, [2, 1])
}

/// Asymmetric signaling over 3 slots for M=2, J=[3,3]: 4 real streams per user
/// in a 12-dimensional real transmit space, 4/3 DoF.
pub fn build_theorem2_scheme(ch: &ChannelRealization) -> Result<(LinearScheme, VerificationLedger)> {
    build_two_user(SchemeKind::Theorem2, ch, [4, 4])
}

/// MIMO broadcast examples 1-4. Examples with 4 states choose the third
/// combiner from eigenvectors of `B1^{-1} B3 B4^{-1} B2`.
pub fn build_mimo_bc_scheme(
    ch: &ChannelRealization,
    example: u8,
    channel: MimoBcChannel,
) -> Result<(LinearScheme, VerificationLedger)> {
    let streams = match (example, channel) {
        (1 | 3, _) => [2, 1],
        (2 | 4, MimoBcChannel::Structured) => [4, 4],
        (2 | 4, _) => [2, 2],
        _ => return Err(Error::Unsupported(format!("MIMO broadcast example {example}"))),
    };
    build_two_user(SchemeKind::MimoBroadcast { example, channel }, ch, streams)
}

fn dft5() -> CMat {
    let n = 5.0_f64;
    CMat::from_fn(5, 5, |a, b| {
        let theta = -2.0 * std::f64::consts::PI * (a * b) as f64 / n;
        c(theta.cos(), theta.sin()) / n.sqrt()
    })
}

/// Combiners sharing two columns across the three states, with one distinct
/// column each: states use columns {0,1,2}, {0,1,3}, {0,1,4}.
fn shared_column_combiners(basis: &CMat) -> Vec<CMat> {
    [2usize, 3, 4]
        .iter()
        .map(|&last| hstack(&[&basis.columns(0, 2).into_owned(), &basis.columns(last, 1).into_owned()]))
        .collect()
}

fn weingarten_combiners(ch: &ChannelRealization, family: WeingartenCombiners) -> Vec<Vec<CMat>> {
    match family {
        WeingartenCombiners::IdentityDft => {
            vec![shared_column_combiners(&identity(5)), shared_column_combiners(&dft5())]
        }
        WeingartenCombiners::Random => (0..2)
            .map(|k| {
                let mut rng = aux_rng(ch, k);
                (0..3).map(|_| random_matrix(&mut rng, 5, 3, Field::Complex)).collect()
            })
            .collect(),
    }
}

/// Dimension of each user's protected space `[H_1^T V_1, H_2^T V_2, H_3^T V_3]`
/// over 5 slots: 7 with identity/DFT combiners, 9 with random ones.
pub fn weingarten_protected_dimensions(ch: &ChannelRealization, family: WeingartenCombiners) -> Result<[usize; 2]> {
    let net = network_for(SchemeKind::Weingarten, ch)?;
    let combiners = weingarten_combiners(ch, family);
    Ok([protected_rank(&net, &combiners[0], 0), protected_rank(&net, &combiners[1], 1)])
}

/// Identity/DFT combiners over 5 slots; 3 complex streams per user, 6/5 DoF.
pub fn build_weingarten_baseline(ch: &ChannelRealization) -> Result<(LinearScheme, VerificationLedger)> {
    let net = network_for(SchemeKind::Weingarten, ch)?;
    let combiners = weingarten_combiners(ch, WeingartenCombiners::IdentityDft);
    let beamformers = complement_beamformers(&net, &combiners, &[3, 3]);
    let scheme = LinearScheme::new(SchemeKind::Weingarten, &net, beamformers, combiners);
    let ledger = verify_on_network(&net, &scheme)?;
    Ok((scheme, ledger))
}

/// Runs the 3-slot alignment with symmetric complex signaling and records, for
/// every user and state, that `[protected basis of the other user, H_j^T V_j]`
/// loses exactly one dimension: the desired streams collapse at the receiver.
pub fn check_symmetric_signaling_fails(ch: &ChannelRealization) -> Result<VerificationLedger> {
    let net = network_for(SchemeKind::SymmetricSignaling, ch)?;
    let mut combiners = Vec::with_capacity(2);
    for k in 0..2 {
        combiners.push(aligned_combiners(&net.channels[k], 2, Field::Complex, &mut aux_rng(ch, k))?);
    }
    let mut ledger = VerificationLedger::new();
    for k in 0..2 {
        let other_basis = protected_basis(&net, &combiners[1 - k], 1 - k);
        for (j, h) in net.channels[k].iter().enumerate() {
            let m = hstack(&[&other_basis, &(h.transpose() * &combiners[k][j])]);
            let deficiency = m.ncols() - numerical_rank(&m, RANK_TOL);
            let name = format!("user{}.state{}", k + 1, j + 1);
            ledger.record(
                format!("{name}.rank_deficiency"),
                CheckKind::SpanDimension,
                deficiency as f64,
                Relation::Equal,
                1.0,
            );
            ledger.record(
                format!("{name}.separation_sigma_ratio"),
                CheckKind::Rank,
                column_rank_ratio(&m),
                Relation::Below,
                RANK_TOL,
            );
        }
    }
    Ok(ledger)
}

/// Protected-space dimension, separation rank and (for four states) eigen checks.
pub(super) fn kind_checks(net: &LinearNetwork, scheme: &LinearScheme, ledger: &mut VerificationLedger) {
    for k in 0..2 {
        let other = 1 - k;
        let combiners = &scheme.rx_combiners[k];
        let states = net.channels[k].len();
        let expected = (net.tx_dim - scheme.streams[other]).min(states * scheme.streams[k]);
        ledger.record(
            format!("user{}.protected_dim", k + 1),
            CheckKind::SpanDimension,
            protected_rank(net, combiners, k) as f64,
            Relation::Equal,
            expected as f64,
        );
        let other_basis = protected_basis(net, &scheme.rx_combiners[other], other);
        for (j, h) in net.channels[k].iter().enumerate() {
            let m = hstack(&[&other_basis, &(h.transpose() * &combiners[j])]);
            ledger.record(
                format!("user{}.state{}.separation_rank", k + 1, j + 1),
                CheckKind::Rank,
                column_rank_ratio(&m),
                Relation::Above,
                RANK_TOL,
            );
        }
        if states == 4 && scheme.streams[k] > 0 {
            let invariance = eigen_blocks(&net.channels[k])
                .and_then(|b| eigen_product(&b))
                .map(|(a, _)| {
                    let v3 = &combiners[2];
                    let av = &a * v3;
                    let q = crate::linalg::column_space(v3, net.field);
                    let outside = &av - &q * (q.adjoint() * &av);
                    if av.norm() == 0.0 {
                        0.0
                    } else {
                        outside.norm() / av.norm()
                    }
                })
                .unwrap_or(f64::INFINITY);
            ledger.record(
                format!("user{}.eigen_invariance", k + 1),
                CheckKind::EigenReality,
                invariance,
                Relation::Below,
                RESIDUAL_TOL,
            );
            if net.field == Field::Real {
                ledger.record(
                    format!("user{}.eigen_real", k + 1),
                    CheckKind::EigenReality,
                    imag_fraction(&combiners[2]),
                    Relation::Below,
                    RESIDUAL_TOL,
                );
            }
        }
    }
}
