//! K-user real interference channel, single state per receiver: the
//! canonical direction sets and the finite-n DoF as n grows toward K/2.

use compound_align::channel::{sample_channel, CompoundScenario, Setting};
use compound_align::rational::{build_ic_scheme, finite_n_dof};
use num_bigint::BigInt;
use num_rational::BigRational;

fn main() -> compound_align::Result<()> {
    let eps = BigRational::new(BigInt::from(1), BigInt::from(10));
    let ch = sample_channel(&CompoundScenario::ic(Setting::Real, vec![1, 1], 3))?;
    let (scheme, _) = build_ic_scheme(&ch, 1, &eps)?;
    for set in &scheme.sets {
        println!("{} = {:?}", set.name, set.canonical(&scheme.registry));
    }
    println!("power exponents: bound {} scale {}", scheme.power.bound, scheme.power.scale);

    for k in [2usize, 3] {
        let ch = sample_channel(&CompoundScenario::ic(Setting::Real, vec![1; k], 3))?;
        let row: Vec<String> = (1..=3)
            .map(|n| build_ic_scheme(&ch, n, &eps).map(|(s, _)| finite_n_dof(&s).to_string()))
            .collect::<compound_align::Result<_>>()?;
        println!("K={k}: n=1..3 -> {}", row.join(", "));
    }
    Ok(())
}
