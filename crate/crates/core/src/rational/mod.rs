//! Rational-dimension alignment over monomials in channel coefficients.
//!
//! Directions are exponent vectors over a [`VariableRegistry`]; every check
//! here is exact integer comparison. Span over the rationals is closed under
//! negation, so membership and distinctness ignore the sign a direction carries.

mod schemes;

pub use schemes::{
    build_bc_real_scheme, build_bc_real_scheme_capped, build_complex_ic_scheme, build_ic_scheme, build_ic_scheme_with,
    build_x_scheme, build_x_scheme_capped, complex_ic_to_real_ic, IcOptions,
};

use crate::channel::VariableRegistry;
use crate::error::{Error, Result};
use crate::ledger::{CheckKind, Relation, VerificationLedger};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::{HashMap, HashSet};

/// Default cap on the size of an enumerated direction set.
pub const SIZE_LIMIT: u128 = 1_000_000;

/// Sorted `(symbol, exponent)` pairs with nonzero exponents.
pub type Exponents = Vec<(usize, u32)>;

/// `sign * prod symbol^exp`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialDirection {
    exponents: Exponents,
    pub sign: i8,
}

impl MonomialDirection {
    /// The direction "1".
    pub fn one() -> Self {
        MonomialDirection { exponents: Vec::new(), sign: 1 }
    }

    pub fn var(symbol: usize, sign: i8) -> Self {
        MonomialDirection { exponents: vec![(symbol, 1)], sign }
    }

    pub fn from_exponents(mut exponents: Exponents, sign: i8) -> Self {
        exponents.retain(|&(_, e)| e > 0);
        exponents.sort_unstable();
        let mut merged: Exponents = Vec::with_capacity(exponents.len());
        for (s, e) in exponents {
            match merged.last_mut() {
                Some(last) if last.0 == s => last.1 += e,
                _ => merged.push((s, e)),
            }
        }
        MonomialDirection { exponents: merged, sign }
    }

    pub fn exponents(&self) -> &[(usize, u32)] {
        &self.exponents
    }

    pub fn exponent_of(&self, symbol: usize) -> u32 {
        self.exponents.binary_search_by_key(&symbol, |p| p.0).map(|i| self.exponents[i].1).unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().map(|p| p.1).sum()
    }

    /// Exponent-wise sum, sign product.
    pub fn mul(&self, other: &MonomialDirection) -> MonomialDirection {
        let (a, b) = (&self.exponents, &other.exponents);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j]);
                j += 1;
            } else {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
        MonomialDirection { exponents: out, sign: self.sign * other.sign }
    }

    /// Canonical text: sign, then `name^exp` factors in registry order joined by `*`.
    pub fn canonical(&self, registry: &VariableRegistry) -> String {
        let sign = if self.sign < 0 { "-" } else { "+" };
        if self.is_one() {
            return format!("{sign}1");
        }
        let factors: Vec<String> =
            self.exponents.iter().map(|&(s, e)| format!("{}^{}", registry.get(s).name, e)).collect();
        format!("{sign}{}", factors.join("*"))
    }

    /// Floating-point value under the registry's symbol values.
    pub fn value(&self, registry: &VariableRegistry) -> f64 {
        self.exponents.iter().fold(f64::from(self.sign), |acc, &(s, e)| acc * registry.get(s).value.powi(e as i32))
    }

    /// Exact value under substituted rational symbol values.
    pub fn exact_value(&self, values: &[BigRational]) -> BigRational {
        let mut acc = BigRational::from_integer(BigInt::from(self.sign));
        for &(s, e) in &self.exponents {
            acc *= num_traits::pow(values[s].clone(), e as usize);
        }
        acc
    }
}

/// Ordered monomial directions with exact membership lookup (sign ignored).
#[derive(Debug, Clone)]
pub struct DirectionSet {
    pub name: String,
    members: Vec<MonomialDirection>,
    /// Variables the set ranges over.
    pub vars: Vec<usize>,
    /// Largest exponent per variable.
    pub bound: u32,
    lookup: HashSet<Exponents>,
}

impl DirectionSet {
    pub fn new(name: impl Into<String>, members: Vec<MonomialDirection>, vars: Vec<usize>, bound: u32) -> Self {
        let lookup = members.iter().map(|m| m.exponents.clone()).collect();
        DirectionSet { name: name.into(), members, vars, bound, lookup }
    }

    /// `{g, g^2, ..., g^count}` for a single generator symbol.
    pub fn powers(name: impl Into<String>, generator: usize, count: u32) -> Self {
        let members = (1..=count).map(|e| MonomialDirection::from_exponents(vec![(generator, e)], 1)).collect();
        DirectionSet::new(name, members, vec![generator], count)
    }

    pub fn members(&self) -> &[MonomialDirection] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, d: &MonomialDirection) -> bool {
        self.lookup.contains(&d.exponents)
    }

    /// True when no two members share an exponent map.
    pub fn pairwise_distinct(&self) -> bool {
        self.lookup.len() == self.members.len()
    }

    /// Every member multiplied by `m`.
    pub fn scaled(&self, m: &MonomialDirection, name: impl Into<String>) -> DirectionSet {
        let mut vars = self.vars.clone();
        for &(s, _) in m.exponents() {
            if !vars.contains(&s) {
                vars.push(s);
            }
        }
        DirectionSet::new(name, self.members.iter().map(|v| m.mul(v)).collect(), vars, self.bound)
    }

    pub fn canonical(&self, registry: &VariableRegistry) -> Vec<String> {
        self.members.iter().map(|m| m.canonical(registry)).collect()
    }

    /// Sum of squared member values.
    pub fn norm_sq(&self, registry: &VariableRegistry) -> f64 {
        self.members.iter().map(|m| m.value(registry).powi(2)).sum()
    }
}

/// `bound^vars`, saturating.
pub fn box_size(vars: usize, bound: u32) -> u128 {
    u32::try_from(vars).ok().and_then(|v| u128::from(bound).checked_pow(v)).unwrap_or(u128::MAX)
}

fn enumerate_box(name: &str, vars: &[usize], bound: u32) -> DirectionSet {
    let mut sorted = vars.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let n = sorted.len();
    let total = box_size(n, bound) as usize;
    let mut members = Vec::with_capacity(total);
    let mut digits = vec![1u32; n];
    loop {
        members.push(MonomialDirection {
            exponents: sorted.iter().copied().zip(digits.iter().copied()).collect(),
            sign: 1,
        });
        let mut k = n;
        loop {
            if k == 0 {
                return DirectionSet::new(name, members, sorted, bound);
            }
            k -= 1;
            if digits[k] < bound {
                digits[k] += 1;
                break;
            }
            digits[k] = 1;
        }
    }
}

/// Builds `V` (exponents in `1..=n`) and `U` (exponents in `1..=n+1`) over `vars`.
pub fn make_monomial_sets(vars: &[usize], n: u32) -> Result<(DirectionSet, DirectionSet)> {
    make_monomial_sets_capped(vars, n, SIZE_LIMIT)
}

pub fn make_monomial_sets_capped(vars: &[usize], n: u32, cap: u128) -> Result<(DirectionSet, DirectionSet)> {
    if vars.is_empty() || n == 0 {
        return Err(Error::InvalidScenario("monomial sets need at least one variable and n >= 1".into()));
    }
    let mut distinct = vars.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let size = box_size(distinct.len(), n + 1);
    if size > cap {
        return Err(Error::SizeLimit { size, cap });
    }
    Ok((enumerate_box("V", &distinct, n), enumerate_box("U", &distinct, n + 1)))
}

/// True iff every `multiplier * v` lands in `u` up to sign.
pub fn verify_span_inclusion(multiplier: &MonomialDirection, v: &DirectionSet, u: &DirectionSet) -> bool {
    v.members().iter().all(|x| u.contains(&multiplier.mul(x)))
}

/// How the per-stream DoF denominator follows from the direction count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DenominatorRule {
    /// Some direction equals 1: each stream carries `1/m`.
    UnitPresent,
    /// No direction equals 1: each stream carries `1/(m+1)`.
    UnitAbsent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Separability {
    pub m_effective: u128,
    pub rule: DenominatorRule,
}

/// Checks that each desired set is internally distinct and that all desired
/// and interference directions together are pairwise distinct.
pub fn check_separability(desired: &[DirectionSet], interference: &[DirectionSet]) -> Result<Separability> {
    check_separability_named(desired, interference, |m| format!("{:?}", m.exponents()))
}

fn check_separability_named(
    desired: &[DirectionSet],
    interference: &[DirectionSet],
    label: impl Fn(&MonomialDirection) -> String,
) -> Result<Separability> {
    let collision = |set_a: &str, a: &MonomialDirection, set_b: &str, b: &MonomialDirection| Error::Collision {
        first: format!("{set_a}:{}", label(a)),
        second: format!("{set_b}:{}", label(b)),
    };
    let mut seen: HashMap<&Exponents, (&str, &MonomialDirection)> = HashMap::new();
    let mut unit = false;
    for set in desired.iter().chain(interference) {
        for m in set.members() {
            unit |= m.is_one();
            if let Some((prev_set, prev)) = seen.insert(&m.exponents, (&set.name, m)) {
                return Err(collision(prev_set, prev, &set.name, m));
            }
        }
    }
    let m = seen.len() as u128;
    Ok(if unit {
        Separability { m_effective: m, rule: DenominatorRule::UnitPresent }
    } else {
        Separability { m_effective: m + 1, rule: DenominatorRule::UnitAbsent }
    })
}

/// Which rational construction a scheme came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RationalKind {
    Bc,
    X,
    Ic,
    ComplexIc,
}

/// One data message: `|set|` integer streams multiplexed on `set`.
#[derive(Debug, Clone, Serialize)]
pub struct Message {
    pub label: String,
    /// Power-constrained node the message leaves from.
    pub tx: usize,
    /// Index into [`RationalScheme::sets`] of the multiplexing directions.
    pub set: usize,
    /// Index of the set that must absorb this message wherever it interferes.
    pub aligned_into: Option<usize>,
}

/// Scalar gain of `message` at `(receiver, state)`.
#[derive(Debug, Clone, Serialize)]
pub struct Link {
    pub receiver: usize,
    pub state: usize,
    pub message: usize,
    #[serde(skip)]
    pub coefficient: MonomialDirection,
    pub coefficient_text: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReceiverState {
    pub receiver: usize,
    pub state: usize,
    pub desired: Vec<usize>,
}

/// P-exponents of the constellation bound and of the scaling factor `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerExponents {
    /// Integers are drawn from `[-P^bound, P^bound]`.
    pub bound: BigRational,
    /// `A = P^scale / lambda`.
    pub scale: BigRational,
}

impl PowerExponents {
    pub fn new(m_n: &BigInt, epsilon: &BigRational) -> Self {
        let m = BigRational::from_integer(m_n.clone());
        let one = BigRational::one();
        let two = BigRational::from_integer(BigInt::from(2));
        let den = &two * (&m + epsilon);
        PowerExponents { bound: (&one - epsilon) / &den, scale: (&m - &one + &two * epsilon) / &den }
    }
}

/// A rational-dimension scheme with its direction sets, links and power law.
#[derive(Debug, Clone)]
pub struct RationalScheme {
    pub kind: RationalKind,
    pub n: u32,
    /// Variable counts of the exponent-box sets (one per distinct `V`).
    pub gamma: Vec<usize>,
    pub registry: VariableRegistry,
    pub sets: Vec<DirectionSet>,
    pub messages: Vec<Message>,
    pub links: Vec<Link>,
    pub receivers: Vec<ReceiverState>,
    pub m_n: BigInt,
    pub epsilon: BigRational,
    pub power: PowerExponents,
    /// `(total real DoF)/(DoF unit)`: 2 when the scheme runs on a complex network's real view.
    pub dof_divisor: u32,
    /// Closed-form limit of [`finite_n_dof`] as `n` grows.
    pub limit: BigRational,
}

impl RationalScheme {
    pub fn streams(&self, message: usize) -> usize {
        self.sets[self.messages[message].set].len()
    }

    pub fn total_streams(&self) -> usize {
        (0..self.messages.len()).map(|m| self.streams(m)).sum()
    }

    /// `lambda^2 = max over transmit nodes of the summed squared multiplexing norms`.
    pub fn lambda_with(&self, registry: &VariableRegistry) -> f64 {
        let mut per_tx: HashMap<usize, f64> = HashMap::new();
        for m in &self.messages {
            *per_tx.entry(m.tx).or_default() += self.sets[m.set].norm_sq(registry);
        }
        per_tx.values().copied().fold(0.0, f64::max).sqrt()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda_with(&self.registry)
    }

    pub fn links_at(&self, receiver: usize, state: usize) -> impl Iterator<Item = &Link> {
        self.links.iter().filter(move |l| l.receiver == receiver && l.state == state)
    }

    /// Received direction sets at one receiver state: desired products and
    /// the distinct sets that absorb interference.
    pub fn receiver_sets(&self, rs: &ReceiverState) -> (Vec<DirectionSet>, Vec<DirectionSet>) {
        let mut desired = Vec::new();
        let mut aligned: Vec<usize> = Vec::new();
        for l in self.links_at(rs.receiver, rs.state) {
            let msg = &self.messages[l.message];
            if rs.desired.contains(&l.message) {
                desired
                    .push(self.sets[msg.set].scaled(&l.coefficient, format!("{}*{}", l.coefficient_text, msg.label)));
            } else if let Some(u) = msg.aligned_into {
                if !aligned.contains(&u) {
                    aligned.push(u);
                }
            }
        }
        (desired, aligned.into_iter().map(|u| self.sets[u].clone()).collect())
    }

    /// Separability at one receiver state with canonical labels in errors.
    pub fn separability_at(&self, rs: &ReceiverState) -> Result<Separability> {
        let (desired, aligned) = self.receiver_sets(rs);
        check_separability_named(&desired, &aligned, |m| m.canonical(&self.registry))
    }

    /// Runs every exact check: cardinalities, inclusions, separability, direction
    /// count against `m_n`, and the power-exponent identity.
    pub fn verify(&self) -> VerificationLedger {
        let mut ledger = VerificationLedger::new();
        for set in &self.sets {
            ledger.record_exact(
                format!("set.{}.distinct", set.name),
                CheckKind::Distinctness,
                usize::from(!set.pairwise_distinct()),
            );
            if set.bound > 0 && set.name.starts_with(['V', 'U']) {
                let expected = box_size(set.vars.len(), set.bound) as f64;
                ledger.record(
                    format!("set.{}.cardinality", set.name),
                    CheckKind::Cardinality,
                    set.len() as f64,
                    Relation::Equal,
                    expected,
                );
            }
        }
        for rs in &self.receivers {
            let tag = format!("rx{}.state{}", rs.receiver + 1, rs.state + 1);
            let mut misses = 0;
            for l in self.links_at(rs.receiver, rs.state) {
                if rs.desired.contains(&l.message) {
                    continue;
                }
                let msg = &self.messages[l.message];
                let ok = msg
                    .aligned_into
                    .is_some_and(|u| verify_span_inclusion(&l.coefficient, &self.sets[msg.set], &self.sets[u]));
                misses += usize::from(!ok);
            }
            ledger.record_exact(format!("{tag}.interference_inclusion"), CheckKind::Inclusion, misses);
            match self.separability_at(rs) {
                Ok(sep) => {
                    ledger.record_exact(format!("{tag}.separability"), CheckKind::Distinctness, 0);
                    ledger.record(
                        format!("{tag}.dimension_count"),
                        CheckKind::Cardinality,
                        sep.m_effective as f64,
                        Relation::AtMost,
                        self.m_n.to_string().parse::<f64>().unwrap_or(f64::INFINITY),
                    );
                }
                Err(_) => ledger.record_exact(format!("{tag}.separability"), CheckKind::Distinctness, 1),
            }
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let sum = &self.power.bound + &self.power.scale;
        ledger.record_exact("power.exponent_sum", CheckKind::Exponent, usize::from(sum != half));
        ledger
    }

    /// Exact worst-receiver direction count, over all receiver states.
    pub fn worst_dimension_count(&self) -> Result<u128> {
        let mut worst = 0;
        for rs in &self.receivers {
            worst = worst.max(self.separability_at(rs)?.m_effective);
        }
        Ok(worst)
    }
}

/// Total DoF at parameter `n`: all streams over `m_n`, in the scheme's own unit.
pub fn finite_n_dof(scheme: &RationalScheme) -> BigRational {
    if scheme.m_n.is_zero() {
        return BigRational::zero();
    }
    BigRational::new(BigInt::from(scheme.total_streams()), scheme.m_n.clone() * BigInt::from(scheme.dof_divisor))
}

/// Parses a decimal such as `0.1` into an exact rational.
pub fn rational_from_decimal(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::Config(format!("not a finite number: {x}")));
    }
    let text = format!("{x}");
    let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| Error::Config(format!("bad decimal {x}")))?;
    Ok(BigRational::new(digits, num_traits::pow(BigInt::from(10), frac.len())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_box_sets() {
        let (v, u) = make_monomial_sets(&[0], 1).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(u.len(), 2);
        assert!(verify_span_inclusion(&MonomialDirection::var(0, 1), &v, &u));
    }

    #[test]
    fn product_merges_and_signs() {
        let a = MonomialDirection::from_exponents(vec![(2, 1), (0, 3)], -1);
        let b = MonomialDirection::from_exponents(vec![(1, 2), (2, 2)], -1);
        let p = a.mul(&b);
        assert_eq!(p.exponents(), &[(0, 3), (1, 2), (2, 3)]);
        assert_eq!(p.sign, 1);
        assert_eq!(p.degree(), 8);
    }

    #[test]
    fn duplicate_direction_collides() {
        let d = MonomialDirection::var(0, 1);
        let set = DirectionSet::new("V", vec![d.clone(), d], vec![0], 1);
        assert!(matches!(check_separability(&[set], &[]), Err(Error::Collision { .. })));
    }

    #[test]
    fn unit_direction_changes_rule() {
        let with_one = DirectionSet::new("D", vec![MonomialDirection::one(), MonomialDirection::var(0, 1)], vec![0], 1);
        let sep = check_separability(&[with_one], &[]).unwrap();
        assert_eq!(sep, Separability { m_effective: 2, rule: DenominatorRule::UnitPresent });
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(rational_from_decimal(0.1).unwrap(), BigRational::new(1.into(), 10.into()));
        assert_eq!(rational_from_decimal(2.0).unwrap(), BigRational::from_integer(2.into()));
    }
}
