//! Scenarios, generic channel sampling, and the real-embedding / time-extension transforms.
//!
//! Every independently drawn real scalar gets its own counter-derived ChaCha
//! stream keyed by `(domain, user, state, row, antenna, part)`, so a single
//! coefficient can be regenerated without replaying the others.

use crate::error::{Error, Result};
use crate::linalg::{c, CMat, RMat};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Stream domains for counter-based sampling.
pub mod domain {
    pub const CHANNEL: u64 = 0;
    pub const BEAMFORMING: u64 = 1;
    pub const GENERATOR: u64 = 2;
    pub const PROBE: u64 = 3;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Network {
    Bc,
    X,
    Ic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Real,
    Complex,
}

fn one() -> usize {
    1
}

/// A finite-state compound network.
///
/// `m` is the transmit-antenna count for a BC and the transmitter count for X
/// and IC networks; `k_or_n` is the number of receivers. `rx_antennas` (MIMO
/// broadcast and interference variants) and `tx_antennas` (antennas per
/// transmitter, interference networks only) default to 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompoundScenario {
    pub network: Network,
    pub setting: Setting,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "K_or_N")]
    pub k_or_n: usize,
    #[serde(rename = "J")]
    pub j: Vec<usize>,
    pub seed: u64,
    #[serde(default = "one")]
    pub rx_antennas: usize,
    #[serde(default = "one")]
    pub tx_antennas: usize,
}

impl CompoundScenario {
    pub fn new(network: Network, setting: Setting, m: usize, k_or_n: usize, j: Vec<usize>, seed: u64) -> Self {
        CompoundScenario { network, setting, m, k_or_n, j, seed, rx_antennas: 1, tx_antennas: 1 }
    }

    pub fn bc(setting: Setting, m: usize, j: Vec<usize>, seed: u64) -> Self {
        let k = j.len();
        Self::new(Network::Bc, setting, m, k, j, seed)
    }

    pub fn mimo_bc(setting: Setting, tx: usize, rx: usize, j: Vec<usize>, seed: u64) -> Self {
        let mut s = Self::bc(setting, tx, j, seed);
        s.rx_antennas = rx;
        s
    }

    pub fn x(setting: Setting, m: usize, j: Vec<usize>, seed: u64) -> Self {
        let n = j.len();
        Self::new(Network::X, setting, m, n, j, seed)
    }

    pub fn ic(setting: Setting, j: Vec<usize>, seed: u64) -> Self {
        let k = j.len();
        Self::new(Network::Ic, setting, k, k, j, seed)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        CompoundScenario { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.m == 0 || self.k_or_n == 0 || self.rx_antennas == 0 || self.tx_antennas == 0 {
            return bad("antenna, transmitter and receiver counts must be positive".into());
        }
        if self.j.len() != self.k_or_n {
            return bad(format!("J has {} entries for {} receivers", self.j.len(), self.k_or_n));
        }
        if self.j.contains(&0) {
            return bad("every receiver needs at least one state".into());
        }
        if self.network == Network::Ic && self.m != self.k_or_n {
            return bad("an interference channel pairs each transmitter with one receiver (M == K)".into());
        }
        if self.network == Network::X && (self.rx_antennas != 1 || self.tx_antennas != 1) {
            return bad("X networks use single-antenna nodes".into());
        }
        if self.network == Network::Bc && self.tx_antennas != 1 {
            return bad("a broadcast transmitter's antennas are counted by M".into());
        }
        Ok(())
    }

    /// Columns of every channel matrix: all transmit antennas of all transmitters.
    pub fn tx_dim(&self) -> usize {
        self.m * self.tx_antennas
    }

    pub fn field(&self) -> crate::linalg::Field {
        match self.setting {
            Setting::Real => crate::linalg::Field::Real,
            Setting::Complex => crate::linalg::Field::Complex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolKind {
    /// An independently drawn channel scalar.
    Channel,
    /// A randomly generated helper such as `G0`.
    Auxiliary,
    /// A value computed from other quantities and assumed independent of them.
    Derived,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub value: f64,
    pub kind: SymbolKind,
}

/// Signed reference to a registry symbol: the scalar equals `sign * value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolRef {
    pub symbol: usize,
    pub sign: i8,
}

/// Ordered, named real scalars. Values are interned up to sign, so two equal
/// (or negated) scalars always share one symbol.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VariableRegistry {
    symbols: Vec<Symbol>,
}

impl VariableRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `value` under `name`, or returns the existing symbol whose
    /// magnitude matches exactly. Zero is rejected since no direction can carry it.
    pub fn intern(&mut self, name: &str, value: f64, kind: SymbolKind) -> SymbolRef {
        assert!(value.is_finite() && value != 0.0, "registry values must be finite and nonzero");
        if let Some(i) = self.symbols.iter().position(|s| s.value.abs() == value.abs()) {
            let sign = if self.symbols[i].value == value { 1 } else { -1 };
            return SymbolRef { symbol: i, sign };
        }
        let mut unique = name.to_string();
        while self.symbols.iter().any(|s| s.name == unique) {
            unique.push('\'');
        }
        self.symbols.push(Symbol { name: unique, value, kind });
        SymbolRef { symbol: self.symbols.len() - 1, sign: 1 }
    }

    /// Registry holding exactly `symbols`, in order.
    pub fn from_symbols(symbols: Vec<Symbol>) -> Self {
        VariableRegistry { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn get(&self, i: usize) -> &Symbol {
        &self.symbols[i]
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn value(&self, r: SymbolRef) -> f64 {
        f64::from(r.sign) * self.symbols[r.symbol].value
    }

    /// True when no two symbols share a value (sign included).
    pub fn values_distinct(&self) -> bool {
        let mut v: Vec<u64> = self.symbols.iter().map(|s| s.value.to_bits()).collect();
        v.sort_unstable();
        v.windows(2).all(|w| w[0] != w[1])
    }
}

/// Symbols behind one channel entry: the real part and, for complex channels, the imaginary part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntrySymbols {
    pub re: SymbolRef,
    pub im: Option<SymbolRef>,
}

/// Sampled channel for every (user, state): an `rx_antennas x (M * tx_antennas)` matrix.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub scenario: CompoundScenario,
    pub registry: VariableRegistry,
    coefficients: Vec<Vec<CMat>>,
    entries: Vec<Vec<Vec<EntrySymbols>>>,
}

/// Counter-derived generator for one stream.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for a single channel scalar.
pub fn scalar_stream(user: usize, state: usize, row: usize, antenna: usize, part: usize) -> u64 {
    (domain::CHANNEL << 56)
        | ((user as u64 & 0xfff) << 44)
        | ((state as u64 & 0xfff) << 32)
        | ((row as u64 & 0xff) << 24)
        | ((antenna as u64 & 0xffff) << 8)
        | (part as u64 & 0xff)
}

/// Stream id for auxiliary draws (random beamformers, generators, probe values).
pub fn aux_stream(dom: u64, index: u64) -> u64 {
    (dom << 56) | (index & ((1 << 56) - 1))
}

fn entry_name(s: &CompoundScenario, user: usize, state: usize, row: usize, ant: usize) -> String {
    match s.network {
        Network::Bc if s.rx_antennas > 1 => format!("h[{}].{}.{}.{}", user + 1, state + 1, row + 1, ant + 1),
        Network::Bc => format!("h[{}].{}.{}", user + 1, state + 1, ant + 1),
        Network::Ic if s.rx_antennas > 1 || s.tx_antennas > 1 => {
            format!("H[{},{}].{}.{}.{}", user + 1, ant / s.tx_antennas + 1, state + 1, row + 1, ant % s.tx_antennas + 1)
        }
        Network::X | Network::Ic => format!("h[{},{}].{}", user + 1, ant + 1, state + 1),
    }
}

/// Draws every channel scalar i.i.d. standard normal (real) or circularly
/// symmetric standard complex normal (complex) from the scenario seed.
pub fn sample_channel(scenario: &CompoundScenario) -> Result<ChannelRealization> {
    scenario.validate()?;
    let s = scenario;
    let mut registry = VariableRegistry::new();
    let mut coefficients = Vec::with_capacity(s.k_or_n);
    let mut entries = Vec::with_capacity(s.k_or_n);
    let draw = |user, state, row, ant, part| -> f64 {
        stream_rng(s.seed, scalar_stream(user, state, row, ant, part)).sample(StandardNormal)
    };
    for user in 0..s.k_or_n {
        let mut user_rows = Vec::new();
        let mut user_entries = Vec::new();
        for state in 0..s.j[user] {
            let mut h = CMat::zeros(s.rx_antennas, s.tx_dim());
            let mut syms = Vec::with_capacity(s.rx_antennas * s.tx_dim());
            for row in 0..s.rx_antennas {
                for ant in 0..s.tx_dim() {
                    let name = entry_name(s, user, state, row, ant);
                    let e = match s.setting {
                        Setting::Real => {
                            let v = draw(user, state, row, ant, 0);
                            h[(row, ant)] = c(v, 0.0);
                            EntrySymbols { re: registry.intern(&name, v, SymbolKind::Channel), im: None }
                        }
                        Setting::Complex => {
                            let scale = std::f64::consts::FRAC_1_SQRT_2;
                            let re = scale * draw(user, state, row, ant, 0);
                            let im = scale * draw(user, state, row, ant, 1);
                            h[(row, ant)] = c(re, im);
                            EntrySymbols {
                                re: registry.intern(&format!("re({name})"), re, SymbolKind::Channel),
                                im: Some(registry.intern(&format!("im({name})"), im, SymbolKind::Channel)),
                            }
                        }
                    };
                    syms.push(e);
                }
            }
            user_rows.push(h);
            user_entries.push(syms);
        }
        coefficients.push(user_rows);
        entries.push(user_entries);
    }
    Ok(ChannelRealization { scenario: s.clone(), registry, coefficients, entries })
}

impl ChannelRealization {
    /// Assembles a realization from explicit parts (used by network reductions).
    pub fn from_parts(
        scenario: CompoundScenario,
        registry: VariableRegistry,
        coefficients: Vec<Vec<CMat>>,
        entries: Vec<Vec<Vec<EntrySymbols>>>,
    ) -> Result<Self> {
        scenario.validate()?;
        for (u, rows) in coefficients.iter().enumerate() {
            if rows.len() != scenario.j[u] || entries[u].len() != rows.len() {
                return Err(Error::DimensionMismatch(format!("user {} state count", u + 1)));
            }
            for (h, e) in rows.iter().zip(&entries[u]) {
                if h.nrows() != scenario.rx_antennas || h.ncols() != scenario.tx_dim() || e.len() != h.len() {
                    return Err(Error::DimensionMismatch(format!("user {} channel shape", u + 1)));
                }
            }
        }
        Ok(ChannelRealization { scenario, registry, coefficients, entries })
    }

    pub fn num_users(&self) -> usize {
        self.coefficients.len()
    }

    pub fn num_states(&self, user: usize) -> usize {
        self.coefficients[user].len()
    }

    /// Channel of `user` in `state`: `rx_antennas x (M * tx_antennas)`.
    pub fn channel(&self, user: usize, state: usize) -> &CMat {
        &self.coefficients[user][state]
    }

    pub fn entry_symbols(&self, user: usize, state: usize, row: usize, ant: usize) -> EntrySymbols {
        self.entries[user][state][row * self.scenario.tx_dim() + ant]
    }

    /// Overwrites one entry; the registry reuses a symbol when the value
    /// matches an existing one up to sign and otherwise adds a derived symbol.
    pub fn set_entry(&mut self, user: usize, state: usize, row: usize, ant: usize, value: Complex64) {
        let name = entry_name(&self.scenario, user, state, row, ant);
        let e = match self.scenario.setting {
            Setting::Real => EntrySymbols { re: self.registry.intern(&name, value.re, SymbolKind::Derived), im: None },
            Setting::Complex => EntrySymbols {
                re: self.registry.intern(&format!("re({name})"), value.re, SymbolKind::Derived),
                im: Some(self.registry.intern(&format!("im({name})"), value.im, SymbolKind::Derived)),
            },
        };
        self.coefficients[user][state][(row, ant)] = match self.scenario.setting {
            Setting::Real => c(value.re, 0.0),
            Setting::Complex => value,
        };
        self.entries[user][state][row * self.scenario.tx_dim() + ant] = e;
    }

    /// Makes `(to_user, to_state)` an exact copy of `(from_user, from_state)`.
    pub fn copy_state(&mut self, from_user: usize, from_state: usize, to_user: usize, to_state: usize) {
        let h = self.coefficients[from_user][from_state].clone();
        for row in 0..h.nrows() {
            for ant in 0..h.ncols() {
                self.set_entry(to_user, to_state, row, ant, h[(row, ant)]);
            }
        }
    }

    /// Multiplies one state's channel by a nonzero constant.
    pub fn scale_state(&mut self, user: usize, state: usize, factor: f64) {
        let h = self.coefficients[user][state].clone();
        for row in 0..h.nrows() {
            for ant in 0..h.ncols() {
                self.set_entry(user, state, row, ant, h[(row, ant)] * factor);
            }
        }
    }
}

/// Real embedding of a complex matrix: entry `h` becomes the 2x2 block
/// `[[Re h, -Im h], [Im h, Re h]]`, so `r x M` maps to `2r x 2M`.
pub fn embed_complex_to_real(h: &CMat) -> RMat {
    let mut out = RMat::zeros(2 * h.nrows(), 2 * h.ncols());
    for i in 0..h.nrows() {
        for m in 0..h.ncols() {
            let z = h[(i, m)];
            out[(2 * i, 2 * m)] = z.re;
            out[(2 * i, 2 * m + 1)] = -z.im;
            out[(2 * i + 1, 2 * m)] = z.im;
            out[(2 * i + 1, 2 * m + 1)] = z.re;
        }
    }
    out
}

/// Interleaves a complex vector into `[Re x1, Im x1, Re x2, Im x2, ...]`.
pub fn vec_complex(x: &[Complex64]) -> Vec<f64> {
    x.iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Time extension over `slots` channel uses: `e (x) I_T`. Component `k` in
/// slot `t` sits at index `k * T + t` on both sides.
pub fn extend_channel(e: &RMat, slots: usize) -> RMat {
    assert!(slots >= 1, "at least one slot");
    e.kronecker(&RMat::identity(slots, slots))
}

/// Complex counterpart of [`extend_channel`] for symmetric-signaling models.
pub fn extend_complex(h: &CMat, slots: usize) -> CMat {
    assert!(slots >= 1, "at least one slot");
    h.kronecker(&CMat::identity(slots, slots))
}

/// Permutation taking slot-major stacking (`t * dim + k`) to the extended
/// ordering (`k * T + t`): `out[k * T + t] = x[t * dim + k]`.
pub fn slot_major_to_extended(x: &[f64], dim: usize, slots: usize) -> Vec<f64> {
    assert_eq!(x.len(), dim * slots);
    let mut out = vec![0.0; x.len()];
    for t in 0..slots {
        for k in 0..dim {
            out[k * slots + t] = x[t * dim + k];
        }
    }
    out
}

/// Permutation matrix `P` with `P * x_slot_major = x_extended`.
pub fn slot_permutation(dim: usize, slots: usize) -> RMat {
    let n = dim * slots;
    let mut p = RMat::zeros(n, n);
    for t in 0..slots {
        for k in 0..dim {
            p[(k * slots + t, t * dim + k)] = 1.0;
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_interns_up_to_sign() {
        let mut r = VariableRegistry::new();
        let a = r.intern("a", 1.5, SymbolKind::Channel);
        let b = r.intern("b", -1.5, SymbolKind::Derived);
        let c2 = r.intern("a", 2.0, SymbolKind::Channel);
        assert_eq!(a.symbol, b.symbol);
        assert_eq!(b.sign, -1);
        assert_eq!(r.len(), 2);
        assert_eq!(r.get(c2.symbol).name, "a'");
        assert!(r.values_distinct());
    }

    #[test]
    fn scenario_validation() {
        let mut s = CompoundScenario::bc(Setting::Real, 2, vec![1, 3], 0);
        assert!(s.validate().is_ok());
        s.j.push(2);
        assert!(s.validate().is_err());
        let ic = CompoundScenario::new(Network::Ic, Setting::Real, 3, 2, vec![1, 1], 0);
        assert!(ic.validate().is_err());
    }

    #[test]
    fn copy_state_reuses_symbols() {
        let s = CompoundScenario::bc(Setting::Complex, 2, vec![1, 3], 4);
        let mut ch = sample_channel(&s).unwrap();
        let before = ch.registry.len();
        ch.copy_state(1, 0, 1, 1);
        assert_eq!(ch.channel(1, 0), ch.channel(1, 1));
        assert_eq!(ch.entry_symbols(1, 0, 0, 1), ch.entry_symbols(1, 1, 0, 1));
        assert_eq!(ch.registry.len(), before);
    }
}
