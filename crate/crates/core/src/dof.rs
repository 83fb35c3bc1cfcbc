//! Closed-form degrees of freedom, conjectured values, and the reporting type.

use crate::channel::Setting;
use crate::error::{Error, Result};
use crate::ledger::LedgerSummary;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Serialize, Serializer};

/// Printed wherever the all-states-at-least-M broadcast formula is used.
pub const THEOREM4_NOTE: &str = "Theorem 4 is stated as MN/(M-N+1); its proof concludes with MN/(M+N-1), \
     which is the value used here (it also matches the compound X network it is built from)";

/// Printed next to conjectured values.
pub const CONJECTURE_NOTE: &str = "Conjectures 1 and 2 are disproved for J > M by Theorems 1 and 2";

fn ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Region of the `(J1, J2)` plane for a 2-user BC with `M` antennas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BcRegion {
    /// Both users have fewer than `M` states.
    R1,
    /// Only user 2 has at least `M` states.
    R2,
    /// Only user 1 has at least `M` states.
    R3,
    /// Both users have at least `M` states.
    R4,
}

pub fn classify_bc_region(m: usize, j1: usize, j2: usize) -> BcRegion {
    match (j1 >= m, j2 >= m) {
        (false, false) => BcRegion::R1,
        (false, true) => BcRegion::R2,
        (true, false) => BcRegion::R3,
        (true, true) => BcRegion::R4,
    }
}

/// Total DoF of the compound MISO BC with `M` antennas and single-antenna users.
///
/// Real setting: 2 users in R1 give 2, R2/R3 give `1 + (M-1)/M`, and any
/// number of users with every `J_i >= M` give `MN/(M+N-1)`. Complex setting:
/// only the two solved points `M=2, J=[1,3]` (3/2) and `M=2, J=[3,3]` (4/3).
pub fn dof_bc(m: usize, j: &[usize], setting: Setting) -> Result<BigRational> {
    if m == 0 || j.is_empty() || j.contains(&0) {
        return Err(Error::InvalidScenario("M, the user count and every J must be positive".into()));
    }
    let n = j.len();
    match setting {
        Setting::Complex => match (m, j) {
            (2, [1, 3]) | (2, [3, 1]) => Ok(ratio(3, 2)),
            (2, [3, 3]) => Ok(ratio(4, 3)),
            _ => Err(Error::Unsupported(format!("complex compound BC with M={m}, J={j:?} has no closed form here"))),
        },
        Setting::Real => {
            if n == 1 {
                return Ok(BigRational::one());
            }
            if j.iter().all(|&x| x >= m) {
                return Ok(ratio(m * n, m + n - 1));
            }
            if n == 2 {
                return Ok(match classify_bc_region(m, j[0], j[1]) {
                    BcRegion::R1 => ratio(2, 1),
                    BcRegion::R2 | BcRegion::R3 => ratio(2 * m - 1, m),
                    BcRegion::R4 => unreachable!("handled above"),
                });
            }
            Err(Error::Unsupported(format!("real compound BC with {n} users and some J < M={m}")))
        }
    }
}

/// `MN/(M+N-1)` for the compound X network, whatever the state counts.
pub fn dof_x(m: usize, n: usize) -> BigRational {
    ratio(m * n, m + n - 1)
}

/// `K/2` for the compound interference channel, whatever the state counts.
pub fn dof_ic(k: usize) -> BigRational {
    ratio(k, 2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conjectures {
    /// `1 + (M-1)/J` for `J1 = 1, J2 = J >= M`.
    #[serde(serialize_with = "ser_opt_rational")]
    pub conj1: Option<BigRational>,
    /// `2J/(2J-M+1)` for `J1 = J2 = J >= M`.
    #[serde(serialize_with = "ser_opt_rational")]
    pub conj2: Option<BigRational>,
    /// True when `J > M`, where the conjectured values fall below achievable DoF.
    pub disproved: bool,
}

pub fn conjecture_values(m: usize, j1: usize, j2: usize) -> Conjectures {
    let conj1 = (j1 == 1 && j2 >= m && m >= 1).then(|| BigRational::one() + ratio(m - 1, j2));
    let conj2 = (j1 == j2 && j1 >= m && m >= 1).then(|| ratio(2 * j1, 2 * j1 - m + 1));
    let j = j1.max(j2);
    let disproved = (conj1.is_some() || conj2.is_some()) && j > m;
    Conjectures { conj1, conj2, disproved }
}

/// Complex DoF of an `M x 2` complex compound X network restricted to real
/// signals: `2M/(M+3)`; the flag is true when this exceeds 1 (`M > 3`).
pub fn dof_complex_x_via_real(m: usize) -> (BigRational, bool) {
    let d = ratio(2 * m, m + 3);
    let exceeds = d > BigRational::one();
    (d, exceeds)
}

/// An exact rational with a decimal rendering, as written to JSON reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalJson(pub BigRational);

impl Serialize for RationalJson {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational_value(&self.0).serialize(s)
    }
}

/// `{"num": .., "den": .., "decimal": ..}`; integers that overflow `i64` are written as strings.
pub fn rational_value(r: &BigRational) -> serde_json::Value {
    let int = |b: &BigInt| match b.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(b.to_string()),
    };
    serde_json::json!({
        "num": int(r.numer()),
        "den": int(r.denom()),
        "decimal": r.to_f64().unwrap_or(f64::NAN),
    })
}

fn ser_opt_rational<S: Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref().map(rational_value).serialize(s)
}

fn ser_rational<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    rational_value(v).serialize(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeEstimate {
    pub slope: f64,
    pub stderr: f64,
}

/// Theoretical, conjectured, finite-n and measured DoF for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoFReport {
    #[serde(serialize_with = "ser_rational")]
    pub dof_theoretical: BigRational,
    #[serde(serialize_with = "ser_opt_rational")]
    pub dof_conjectured: Option<BigRational>,
    #[serde(serialize_with = "ser_opt_rational")]
    pub dof_finite_n: Option<BigRational>,
    pub dof_empirical_slope: Option<SlopeEstimate>,
    pub checks: LedgerSummary,
    pub notes: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_boundaries() {
        assert_eq!(classify_bc_region(2, 1, 1), BcRegion::R1);
        assert_eq!(classify_bc_region(2, 1, 3), BcRegion::R2);
        assert_eq!(classify_bc_region(2, 3, 1), BcRegion::R3);
        assert_eq!(classify_bc_region(2, 2, 2), BcRegion::R4);
    }

    #[test]
    fn unsupported_points() {
        assert!(matches!(dof_bc(3, &[1, 1, 1], Setting::Real), Err(Error::Unsupported(_))));
        assert!(matches!(dof_bc(2, &[2, 2], Setting::Complex), Err(Error::Unsupported(_))));
    }

    #[test]
    fn conjectures_outside_regime_are_absent() {
        let c = conjecture_values(3, 2, 2);
        assert_eq!((c.conj1, c.conj2, c.disproved), (None, None, false));
    }

    #[test]
    fn rational_json_shape() {
        let v = rational_value(&ratio(4, 3));
        assert_eq!(v["num"], 4);
        assert_eq!(v["den"], 3);
    }
}
