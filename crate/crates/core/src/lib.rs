//! Interference alignment for finite-state compound networks.
//!
//! The crate builds and verifies alignment schemes for compound broadcast, X
//! and interference channels, evaluates their degrees of freedom in closed
//! form, and estimates them empirically.
//!
//! - [`channel`]: scenarios, generic channel sampling, real embedding, time extension.
//! - [`linear`]: vector-space alignment constructions and their verification ledgers.
//! - [`rational`]: exact monomial direction sets and rational-dimension schemes.
//! - [`dof`]: closed-form DoF, conjectured values, report type.
//! - [`sim`]: zero-forcing rate sweeps and the PAM constellation probe.
//! - [`cli`]: the batch driver behind the `compound-align` binary.
//! - [`ledger`]: named pass/fail checks.
//! - [`linalg`]: SVD-based rank, null-space and eigen helpers.

pub mod channel;
pub mod cli;
pub mod dof;
pub mod error;
pub mod ledger;
pub mod linalg;
pub mod linear;
pub mod rational;
pub mod sim;

pub use error::{Error, Result};
