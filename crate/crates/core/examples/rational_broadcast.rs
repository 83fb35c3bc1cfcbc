//! Single-antenna real broadcast channel with M = 2 antennas and J = [1, 3]:
//! one user is zero-forced, the other is aligned in rational dimensions.

use compound_align::channel::{sample_channel, CompoundScenario, Setting};
use compound_align::rational::{build_bc_real_scheme, finite_n_dof};
use num_bigint::BigInt;
use num_rational::BigRational;

fn main() -> compound_align::Result<()> {
    let ch = sample_channel(&CompoundScenario::bc(Setting::Real, 2, vec![1, 3], 9))?;
    let eps = BigRational::new(BigInt::from(1), BigInt::from(10));
    for n in 1..=3 {
        let (scheme, ledger) = build_bc_real_scheme(&ch, n, &eps)?;
        let sizes: Vec<String> = scheme.sets.iter().map(|s| format!("|{}|={}", s.name, s.len())).collect();
        println!(
            "n={n}: {} ; m_n={} ; finite-n DoF {} -> limit {} ; {} checks, all pass = {}",
            sizes.join(" "),
            scheme.m_n,
            finite_n_dof(&scheme),
            scheme.limit,
            ledger.len(),
            ledger.all_pass()
        );
    }
    Ok(())
}
