//! Vector-space alignment schemes and their verification.
//!
//! A [`LinearScheme`] is always checked against a [`LinearNetwork`] derived
//! from the sampled channel by the scheme kind (real embedding, time
//! extension, topology mask). Builders run [`verify_scheme`] on their own
//! output, so a re-verification reproduces the construction ledger exactly.

mod bc;
mod many_to_one;

pub use bc::{
    build_mimo_bc_scheme, build_theorem1_scheme, build_theorem2_scheme, build_weingarten_baseline,
    check_symmetric_signaling_fails, weingarten_protected_dimensions, MimoBcChannel, WeingartenCombiners,
};
pub use many_to_one::{build_many_to_one_demo, build_many_to_one_with};

use crate::channel::{embed_complex_to_real, extend_channel, extend_complex, ChannelRealization, Network, Setting};
use crate::error::{Error, Result};
use crate::ledger::{CheckKind, Relation, VerificationLedger};
use crate::linalg::{
    column_rank_ratio, column_space, hstack, imag_fraction, numerical_rank, to_complex, CMat, Field, MatrixData,
    RANK_TOL, RESIDUAL_TOL,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

/// Which construction produced a scheme; fixes how the channel is transformed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchemeKind {
    /// Complex MISO BC, M=2, J=[1,3], real embedding (2x4 real channels).
    Theorem1,
    /// Complex MISO BC, M=2, J=[3,3], real embedding over 3 slots (6x12).
    Theorem2,
    /// Compound MIMO BC examples 1-4.
    MimoBroadcast { example: u8, channel: MimoBcChannel },
    /// Identity / DFT combiners over 5 slots of the complex MISO BC.
    Weingarten,
    /// Symmetric complex signaling over 3 slots (expected to fail separation).
    SymmetricSignaling,
    /// 4-user many-to-one interference network, 2 tx / 4 rx antennas.
    ManyToOne,
}

/// Channel matrices in the form a scheme operates on.
#[derive(Debug, Clone)]
pub struct LinearNetwork {
    pub field: Field,
    pub setting: Setting,
    pub tx_dim: usize,
    pub slots: usize,
    /// `[user][state]`: `rx_dim x tx_dim`.
    pub channels: Vec<Vec<CMat>>,
}

impl LinearNetwork {
    pub fn num_users(&self) -> usize {
        self.channels.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearScheme {
    pub kind: SchemeKind,
    pub field: Field,
    pub setting: Setting,
    pub slots: usize,
    /// Per message (one per user): `tx_dim x streams`, unit-norm columns.
    pub tx_beamformers: Vec<CMat>,
    /// `[user][state]`: `rx_dim x streams`.
    pub rx_combiners: Vec<Vec<CMat>>,
    pub streams: Vec<usize>,
    pub dof_claimed: BigRational,
}

/// DoF carried by `streams` over `slots` channel uses. Real streams in a
/// complex setting count one half each.
pub fn dof_count(streams: usize, slots: usize, field: Field, setting: Setting) -> BigRational {
    let weight = if field == Field::Real && setting == Setting::Complex { 2 } else { 1 };
    BigRational::new(BigInt::from(streams), BigInt::from(slots * weight))
}

impl LinearScheme {
    pub fn new(kind: SchemeKind, net: &LinearNetwork, tx_beamformers: Vec<CMat>, rx_combiners: Vec<Vec<CMat>>) -> Self {
        let streams: Vec<usize> = tx_beamformers.iter().map(|b| b.ncols()).collect();
        let dof_claimed = dof_count(streams.iter().sum(), net.slots, net.field, net.setting);
        LinearScheme {
            kind,
            field: net.field,
            setting: net.setting,
            slots: net.slots,
            tx_beamformers,
            rx_combiners,
            streams,
            dof_claimed,
        }
    }

    pub fn total_streams(&self) -> usize {
        self.streams.iter().sum()
    }

    pub fn per_user_dof(&self) -> Vec<BigRational> {
        self.streams.iter().map(|&d| dof_count(d, self.slots, self.field, self.setting)).collect()
    }

    pub fn to_data(&self) -> SchemeData {
        SchemeData {
            kind: self.kind,
            field: self.field,
            setting: self.setting,
            slots: self.slots,
            streams: self.streams.clone(),
            tx_beamformers: self.tx_beamformers.iter().map(MatrixData::from).collect(),
            rx_combiners: self.rx_combiners.iter().map(|u| u.iter().map(MatrixData::from).collect()).collect(),
        }
    }
}

/// Serialisable form of a [`LinearScheme`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeData {
    pub kind: SchemeKind,
    pub field: Field,
    pub setting: Setting,
    pub slots: usize,
    pub streams: Vec<usize>,
    pub tx_beamformers: Vec<MatrixData>,
    pub rx_combiners: Vec<Vec<MatrixData>>,
}

impl SchemeData {
    pub fn to_scheme(&self) -> Result<LinearScheme> {
        let bad = || Error::DimensionMismatch("malformed matrix in scheme data".into());
        let tx: Vec<CMat> = self.tx_beamformers.iter().map(|m| m.to_matrix().ok_or_else(bad)).collect::<Result<_>>()?;
        let rx: Vec<Vec<CMat>> = self
            .rx_combiners
            .iter()
            .map(|u| u.iter().map(|m| m.to_matrix().ok_or_else(bad)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let total: usize = self.streams.iter().sum();
        Ok(LinearScheme {
            kind: self.kind,
            field: self.field,
            setting: self.setting,
            slots: self.slots,
            tx_beamformers: tx,
            rx_combiners: rx,
            streams: self.streams.clone(),
            dof_claimed: dof_count(total, self.slots, self.field, self.setting),
        })
    }
}

fn regime(msg: String) -> Error {
    Error::RegimeMismatch(msg)
}

fn require_bc(ch: &ChannelRealization, setting: Setting, m: usize, rx: usize, j: &[usize], what: &str) -> Result<()> {
    let s = &ch.scenario;
    if s.network != Network::Bc || s.setting != setting || s.m != m || s.rx_antennas != rx || s.j != j {
        return Err(regime(format!(
            "{what} requires a {setting:?} BC with M={m}, {rx} receive antenna(s), J={j:?}; got {:?} {:?} M={} rx={} J={:?}",
            s.network, s.setting, s.m, s.rx_antennas, s.j
        )));
    }
    Ok(())
}

/// Transforms the sampled channel into the network a scheme kind operates on,
/// rejecting scenarios outside the construction's regime.
pub fn network_for(kind: SchemeKind, ch: &ChannelRealization) -> Result<LinearNetwork> {
    ch.scenario.validate()?;
    let users = ch.num_users();
    let per_state = |f: &dyn Fn(&CMat) -> CMat| -> Vec<Vec<CMat>> {
        (0..users).map(|u| (0..ch.num_states(u)).map(|j| f(ch.channel(u, j))).collect()).collect()
    };
    let embedded = |slots: usize| per_state(&|h: &CMat| to_complex(&extend_channel(&embed_complex_to_real(h), slots)));
    let net = |field, setting, tx_dim, slots, channels| LinearNetwork { field, setting, tx_dim, slots, channels };
    match kind {
        SchemeKind::Theorem1 => {
            require_bc(ch, Setting::Complex, 2, 1, &[1, 3], "theorem-1 scheme")?;
            Ok(net(Field::Real, Setting::Complex, 4, 1, embedded(1)))
        }
        SchemeKind::Theorem2 => {
            require_bc(ch, Setting::Complex, 2, 1, &[3, 3], "theorem-2 scheme")?;
            Ok(net(Field::Real, Setting::Complex, 12, 3, embedded(3)))
        }
        SchemeKind::MimoBroadcast { example, channel } => {
            let (tx, rx, j): (usize, usize, Vec<usize>) = match example {
                1 => (4, 2, vec![1, 3]),
                2 => (6, 3, vec![3, 3]),
                3 => (4, 2, vec![1, 4]),
                4 => (6, 3, vec![4, 4]),
                _ => return Err(Error::Unsupported(format!("MIMO broadcast example {example}"))),
            };
            let what = format!("MIMO BC example {example}");
            match channel {
                MimoBcChannel::ComplexGeneric => {
                    require_bc(ch, Setting::Complex, tx, rx, &j, &what)?;
                    Ok(net(Field::Complex, Setting::Complex, tx, 1, per_state(&|h: &CMat| h.clone())))
                }
                MimoBcChannel::RealGeneric => {
                    require_bc(ch, Setting::Real, tx, rx, &j, &what)?;
                    Ok(net(Field::Real, Setting::Real, tx, 1, per_state(&|h: &CMat| h.clone())))
                }
                MimoBcChannel::Structured => {
                    // The MISO model after real embedding (and 3-slot extension for the 6x3 shape).
                    let slots = if tx == 4 { 1 } else { 3 };
                    require_bc(ch, Setting::Complex, 2, 1, &j, &what)?;
                    Ok(net(Field::Real, Setting::Complex, 4 * slots, slots, embedded(slots)))
                }
            }
        }
        SchemeKind::Weingarten => {
            require_bc(ch, Setting::Complex, 2, 1, &[3, 3], "identity/DFT baseline")?;
            Ok(net(Field::Complex, Setting::Complex, 10, 5, per_state(&|h: &CMat| extend_complex(h, 5))))
        }
        SchemeKind::SymmetricSignaling => {
            require_bc(ch, Setting::Complex, 2, 1, &[3, 3], "symmetric-signaling scheme")?;
            Ok(net(Field::Complex, Setting::Complex, 6, 3, per_state(&|h: &CMat| extend_complex(h, 3))))
        }
        SchemeKind::ManyToOne => {
            let s = &ch.scenario;
            if s.network != Network::Ic
                || s.setting != Setting::Real
                || s.m != 4
                || s.tx_antennas != 2
                || s.rx_antennas != 4
                || s.j != [1, 1, 1, 1]
            {
                return Err(regime(
                    "many-to-one demo requires a real 4-user IC with 2 tx and 4 rx antennas, J=[1,1,1,1]".into(),
                ));
            }
            let channels = (0..4)
                .map(|k| {
                    let full = ch.channel(k, 0);
                    if k == 0 {
                        vec![full.clone()]
                    } else {
                        let mut masked = CMat::zeros(4, 8);
                        masked.view_mut((0, 2 * k), (4, 2)).copy_from(&full.view((0, 2 * k), (4, 2)));
                        vec![masked]
                    }
                })
                .collect();
            Ok(net(Field::Real, Setting::Real, 8, 1, channels))
        }
    }
}

fn check_dimensions(net: &LinearNetwork, scheme: &LinearScheme) -> Result<()> {
    let mismatch = |m: String| Err(Error::DimensionMismatch(m));
    let users = net.num_users();
    if scheme.tx_beamformers.len() != users || scheme.rx_combiners.len() != users || scheme.streams.len() != users {
        return mismatch(format!("scheme describes {} messages for {} users", scheme.tx_beamformers.len(), users));
    }
    for u in 0..users {
        let b = &scheme.tx_beamformers[u];
        if b.nrows() != net.tx_dim || b.ncols() != scheme.streams[u] {
            return mismatch(format!(
                "beamformer of user {} is {}x{}, expected {}x{}",
                u + 1,
                b.nrows(),
                b.ncols(),
                net.tx_dim,
                scheme.streams[u]
            ));
        }
        if scheme.rx_combiners[u].len() != net.channels[u].len() {
            return mismatch(format!(
                "user {} has {} combiners for {} states",
                u + 1,
                scheme.rx_combiners[u].len(),
                net.channels[u].len()
            ));
        }
        for (j, (cmb, h)) in scheme.rx_combiners[u].iter().zip(&net.channels[u]).enumerate() {
            if cmb.nrows() != h.nrows() || cmb.ncols() != scheme.streams[u] || h.ncols() != net.tx_dim {
                return mismatch(format!(
                    "combiner of user {} state {} has shape {}x{}",
                    u + 1,
                    j + 1,
                    cmb.nrows(),
                    cmb.ncols()
                ));
            }
        }
    }
    Ok(())
}

/// Protected transmit-side space of a user: `[H_1^T C_1, ..., H_J^T C_J]`.
pub fn protected_space(net: &LinearNetwork, combiners: &[CMat], user: usize) -> CMat {
    let blocks: Vec<CMat> = net.channels[user].iter().zip(combiners).map(|(h, c)| h.transpose() * c).collect();
    let refs: Vec<&CMat> = blocks.iter().collect();
    if refs.is_empty() {
        CMat::zeros(net.tx_dim, 0)
    } else {
        hstack(&refs)
    }
}

/// Re-runs every residual, rank and span check of a scheme against the channel.
pub fn verify_scheme(ch: &ChannelRealization, scheme: &LinearScheme) -> Result<VerificationLedger> {
    let net = network_for(scheme.kind, ch)?;
    verify_on_network(&net, scheme)
}

pub(crate) fn verify_on_network(net: &LinearNetwork, scheme: &LinearScheme) -> Result<VerificationLedger> {
    check_dimensions(net, scheme)?;
    let mut ledger = VerificationLedger::new();
    if scheme.total_streams() == 0 {
        return Ok(ledger);
    }
    generic_checks(net, scheme, &mut ledger);
    match scheme.kind {
        SchemeKind::ManyToOne => many_to_one::kind_checks(net, scheme, &mut ledger),
        SchemeKind::SymmetricSignaling => {}
        _ => bc::kind_checks(net, scheme, &mut ledger),
    }
    Ok(ledger)
}

fn generic_checks(net: &LinearNetwork, scheme: &LinearScheme, ledger: &mut VerificationLedger) {
    for (u, states) in net.channels.iter().enumerate() {
        if scheme.streams[u] == 0 {
            continue;
        }
        for (j, h) in states.iter().enumerate() {
            let cmb = &scheme.rx_combiners[u][j];
            let projected = cmb.transpose() * h;
            let scale = projected.norm();
            for (m, b) in scheme.tx_beamformers.iter().enumerate() {
                if m == u || b.ncols() == 0 {
                    continue;
                }
                let residual = if scale == 0.0 { 0.0 } else { (&projected * b).norm() / scale };
                ledger.record(
                    format!("user{}.state{}.zf_residual.from{}", u + 1, j + 1, m + 1),
                    CheckKind::ZeroForcingResidual,
                    residual,
                    Relation::Below,
                    RESIDUAL_TOL,
                );
            }
            let desired = &projected * &scheme.tx_beamformers[u];
            ledger.record(
                format!("user{}.state{}.desired_rank", u + 1, j + 1),
                CheckKind::Rank,
                column_rank_ratio(&desired),
                Relation::Above,
                RANK_TOL,
            );
        }
    }
    if scheme.field == Field::Real {
        let worst = scheme
            .tx_beamformers
            .iter()
            .chain(scheme.rx_combiners.iter().flatten())
            .map(imag_fraction)
            .fold(0.0, f64::max);
        ledger.record("real_field_beamforming", CheckKind::EigenReality, worst, Relation::Below, RESIDUAL_TOL);
    }
}

/// Orthonormal basis of a user's protected space.
pub(crate) fn protected_basis(net: &LinearNetwork, combiners: &[CMat], user: usize) -> CMat {
    column_space(&protected_space(net, combiners, user), net.field)
}

pub(crate) fn protected_rank(net: &LinearNetwork, combiners: &[CMat], user: usize) -> usize {
    numerical_rank(&protected_space(net, combiners, user), RANK_TOL)
}
