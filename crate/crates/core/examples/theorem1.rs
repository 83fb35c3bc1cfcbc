//! Asymmetric complex signaling on the complex MISO broadcast channel with
//! M = 2 antennas, one state for user 1 and three for user 2.

use compound_align::channel::{sample_channel, CompoundScenario, Setting};
use compound_align::linear::build_theorem1_scheme;
use compound_align::sim::{default_power_grid, zf_rate_sweep};

fn main() -> compound_align::Result<()> {
    let ch = sample_channel(&CompoundScenario::bc(Setting::Complex, 2, vec![1, 3], 42))?;
    let (scheme, ledger) = build_theorem1_scheme(&ch)?;
    println!("streams per user {:?} over {} slot(s), claimed DoF {}", scheme.streams, scheme.slots, scheme.dof_claimed);
    for check in &ledger.checks {
        println!("  {:<40} {:>10.3e} {}", check.name, check.measured, if check.pass { "ok" } else { "FAIL" });
    }

    let sweep = zf_rate_sweep(&ch, &scheme, &default_power_grid())?;
    for (p, r) in sweep.powers.iter().zip(&sweep.total_rates) {
        println!("P = {p:>8.0e}  total rate {r:>7.3} bits");
    }
    println!("slope {:.4} +/- {:.4}", sweep.fit.slope, sweep.fit.stderr);
    Ok(())
}
