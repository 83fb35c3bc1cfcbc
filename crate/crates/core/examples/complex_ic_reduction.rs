//! A complex interference channel treated as a real one with twice the users;
//! real and imaginary parts of each coefficient stay tied to one symbol.

use compound_align::channel::{sample_channel, CompoundScenario, Setting};
use compound_align::rational::{build_complex_ic_scheme, complex_ic_to_real_ic, finite_n_dof};
use num_bigint::BigInt;
use num_rational::BigRational;

fn main() -> compound_align::Result<()> {
    let ch = sample_channel(&CompoundScenario::ic(Setting::Complex, vec![1, 1], 2))?;
    let real = complex_ic_to_real_ic(&ch)?;
    println!("real view: {} users, {} distinct symbols", real.scenario.k_or_n, real.registry.len());
    for u in 0..real.scenario.k_or_n {
        let row: Vec<String> = (0..real.scenario.k_or_n)
            .map(|t| {
                let e = real.entry_symbols(u, 0, 0, t).re;
                format!("{}{}", if e.sign < 0 { "-" } else { "+" }, real.registry.get(e.symbol).name)
            })
            .collect();
        println!("  rx {}: {}", u + 1, row.join("  "));
    }
    let eps = BigRational::new(BigInt::from(1), BigInt::from(10));
    let (scheme, ledger) = build_complex_ic_scheme(&ch, 1, &eps)?;
    println!(
        "complex DoF at n=1: {} (limit {}), ledger pass {}",
        finite_n_dof(&scheme),
        scheme.limit,
        ledger.all_pass()
    );
    Ok(())
}
