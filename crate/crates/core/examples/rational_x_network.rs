//! 2x2 real compound X network with two states per receiver.

use compound_align::channel::{sample_channel, CompoundScenario, Setting};
use compound_align::rational::{build_x_scheme, finite_n_dof};
use num_bigint::BigInt;
use num_rational::BigRational;

fn main() -> compound_align::Result<()> {
    let ch = sample_channel(&CompoundScenario::x(Setting::Real, 2, vec![2, 2], 4))?;
    let eps = BigRational::new(BigInt::from(1), BigInt::from(10));
    let (scheme, ledger) = build_x_scheme(&ch, 1, &eps)?;
    for m in &scheme.messages {
        println!("{} from tx {} uses {}", m.label, m.tx + 1, scheme.sets[m.set].name);
    }
    for rs in &scheme.receivers {
        let sep = scheme.separability_at(rs)?;
        println!("receiver {} state {}: {} rational dimensions", rs.receiver + 1, rs.state + 1, sep.m_effective);
    }
    println!("m_n = {}, finite-n DoF {}, ledger pass {}", scheme.m_n, finite_n_dof(&scheme), ledger.all_pass());
    Ok(())
}
