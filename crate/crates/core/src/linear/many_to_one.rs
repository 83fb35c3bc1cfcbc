//! Receiver-side alignment in the 4-user many-to-one interference network.
//!
//! Receiver 1 hears every transmitter; receivers 2-4 hear only their own.
//! Transmitters 2 and 3 pick directions so that transmitter 4's interference
//! at receiver 1 falls inside the span of theirs, leaving 2 of 4 dimensions free.

use super::{network_for, verify_on_network, LinearNetwork, LinearScheme, SchemeKind};
use crate::channel::{aux_stream, domain, stream_rng, ChannelRealization};
use crate::error::{Error, Result};
use crate::ledger::{CheckKind, Relation, VerificationLedger};
use crate::linalg::{
    column_rank_ratio, column_space, hstack, identity, null_space, numerical_rank, random_matrix, sigma_ratio, solve,
    CMat, Field, RANK_TOL, RESIDUAL_TOL,
};

/// `H^{[1i]}`: the 4x2 block from transmitter `i` (0-based) at receiver 1.
fn cross_block(net: &LinearNetwork, i: usize) -> CMat {
    net.channels[0][0].view((0, 2 * i), (4, 2)).into_owned()
}

fn place(block: &CMat, tx: usize) -> CMat {
    let mut out = CMat::zeros(8, block.ncols());
    out.view_mut((2 * tx, 0), (2, block.ncols())).copy_from(block);
    out
}

/// Draws `v4` from the scenario seed and builds the scheme.
pub fn build_many_to_one_demo(ch: &ChannelRealization) -> Result<(LinearScheme, VerificationLedger)> {
    let mut rng = stream_rng(ch.scenario.seed, aux_stream(domain::BEAMFORMING, 4));
    let v4 = random_matrix(&mut rng, 2, 1, Field::Real);
    build_many_to_one_with(ch, &v4)
}

/// Builds the scheme for a given 2x1 beamformer of transmitter 4:
/// `[v2; v3] = [H12 H13]^{-1} H14 v4`.
pub fn build_many_to_one_with(ch: &ChannelRealization, v4: &CMat) -> Result<(LinearScheme, VerificationLedger)> {
    let net = network_for(SchemeKind::ManyToOne, ch)?;
    if v4.shape() != (2, 1) {
        return Err(Error::DimensionMismatch(format!("v4 must be 2x1, got {}x{}", v4.nrows(), v4.ncols())));
    }
    if v4.norm() == 0.0 {
        return Err(Error::ZeroBeamformer("transmitter 4 direction is zero".into()));
    }
    let stack = hstack(&[&cross_block(&net, 1), &cross_block(&net, 2)]);
    let ratio = sigma_ratio(&stack);
    if ratio <= RANK_TOL {
        return Err(Error::SingularStack { ratio });
    }
    let x = solve(&stack, &(cross_block(&net, 3) * v4)).ok_or(Error::SingularStack { ratio })?;
    let mut v = [identity(2), x.rows(0, 2).into_owned(), x.rows(2, 2).into_owned(), v4.clone()];
    for (i, vi) in v.iter_mut().enumerate().skip(1) {
        let n = vi.norm();
        if n == 0.0 {
            return Err(Error::ZeroBeamformer(format!("transmitter {} direction is zero", i + 1)));
        }
        *vi /= nalgebra::Complex::new(n, 0.0);
    }
    let beamformers: Vec<CMat> = v.iter().enumerate().map(|(i, b)| place(b, i)).collect();
    let interference = interference_at_rx1(&net, &beamformers);
    let mut combiners = vec![vec![null_space(&interference.transpose(), Field::Real, Some(2))]];
    for (k, b) in beamformers.iter().enumerate().skip(1) {
        let mut matched = &net.channels[k][0] * b;
        let n = matched.norm();
        if n > 0.0 {
            matched /= nalgebra::Complex::new(n, 0.0);
        }
        combiners.push(vec![matched]);
    }
    let scheme = LinearScheme::new(SchemeKind::ManyToOne, &net, beamformers, combiners);
    let ledger = verify_on_network(&net, &scheme)?;
    Ok((scheme, ledger))
}

fn interference_at_rx1(net: &LinearNetwork, beamformers: &[CMat]) -> CMat {
    let h = &net.channels[0][0];
    let cols: Vec<CMat> = beamformers[1..].iter().map(|b| h * b).collect();
    let refs: Vec<&CMat> = cols.iter().collect();
    hstack(&refs)
}

pub(super) fn kind_checks(net: &LinearNetwork, scheme: &LinearScheme, ledger: &mut VerificationLedger) {
    let h = &net.channels[0][0];
    let interference = interference_at_rx1(net, &scheme.tx_beamformers);
    ledger.record(
        "rx1.interference_dim",
        CheckKind::SpanDimension,
        numerical_rank(&interference, RANK_TOL) as f64,
        Relation::Equal,
        2.0,
    );
    let pair = interference.columns(0, 2).into_owned();
    let aligned = interference.column(2).into_owned();
    let q = column_space(&pair, Field::Real);
    let outside = &aligned - &q * (q.adjoint() * &aligned);
    let residual = if aligned.norm() == 0.0 { 0.0 } else { outside.norm() / aligned.norm() };
    ledger.record("rx1.alignment_residual", CheckKind::ZeroForcingResidual, residual, Relation::Below, RESIDUAL_TOL);
    let desired = h * &scheme.tx_beamformers[0];
    let stack = hstack(&[&desired, &pair]);
    ledger.record(
        "rx1.desired_interference_rank",
        CheckKind::Rank,
        column_rank_ratio(&stack),
        Relation::Above,
        RANK_TOL,
    );
}
