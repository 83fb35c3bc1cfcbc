//! Named pass/fail checks collected while building or re-verifying a scheme.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    ZeroForcingResidual,
    Rank,
    SpanDimension,
    EigenReality,
    /// Exact monomial inclusion in an interference set.
    Inclusion,
    /// Exact set size.
    Cardinality,
    /// Exact pairwise distinctness of directions.
    Distinctness,
    /// Exact rational identity on power exponents or DoF counts.
    Exponent,
}

/// Comparison a measured value must satisfy against its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
    #[serde(rename = "==")]
    Equal,
    #[serde(rename = "<=")]
    AtMost,
}

impl Relation {
    pub fn holds(self, measured: f64, threshold: f64) -> bool {
        match self {
            Relation::Below => measured < threshold,
            Relation::Above => measured > threshold,
            Relation::Equal => measured == threshold,
            Relation::AtMost => measured <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub measured: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, kind: CheckKind, measured: f64, relation: Relation, threshold: f64) -> Self {
        let pass = relation.holds(measured, threshold);
        Check { name: name.into(), kind, measured, relation, threshold, pass }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationLedger {
    pub checks: Vec<Check>,
}

impl VerificationLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn record(
        &mut self,
        name: impl Into<String>,
        kind: CheckKind,
        measured: f64,
        relation: Relation,
        threshold: f64,
    ) {
        self.push(Check::new(name, kind, measured, relation, threshold));
    }

    /// Records an exact boolean condition as `failures == 0`.
    pub fn record_exact(&mut self, name: impl Into<String>, kind: CheckKind, failures: usize) {
        self.push(Check::new(name, kind, failures as f64, Relation::Equal, 0.0));
    }

    pub fn extend(&mut self, other: VerificationLedger) {
        self.checks.extend(other.checks);
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `(name, pass)` pairs in recording order.
    pub fn pass_set(&self) -> Vec<(String, bool)> {
        self.checks.iter().map(|c| (c.name.clone(), c.pass)).collect()
    }

    pub fn summary(&self) -> LedgerSummary {
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        LedgerSummary {
            total: self.checks.len(),
            passed: self.checks.len() - failed,
            failed,
            failing: self.failures().iter().map(|c| c.name.clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub failing: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_follows_relation() {
        assert!(Check::new("a", CheckKind::Rank, 0.5, Relation::Above, 1e-8).pass);
        assert!(!Check::new("b", CheckKind::ZeroForcingResidual, 1e-9, Relation::Below, 1e-9).pass);
        assert!(Check::new("c", CheckKind::SpanDimension, 7.0, Relation::Equal, 7.0).pass);
        let mut l = VerificationLedger::new();
        assert!(l.all_pass());
        l.record_exact("d", CheckKind::Inclusion, 2);
        assert_eq!(l.summary().failed, 1);
    }
}
