//! Identity/DFT combiners over 5 slots: the protected space has dimension 7
//! where random combiners give 9, which leaves room for 3 streams per user.

use compound_align::channel::{sample_channel, CompoundScenario, Setting};
use compound_align::linear::{build_weingarten_baseline, weingarten_protected_dimensions, WeingartenCombiners};
use compound_align::sim::{default_power_grid, zf_rate_sweep};

fn main() -> compound_align::Result<()> {
    let ch = sample_channel(&CompoundScenario::bc(Setting::Complex, 2, vec![3, 3], 3))?;
    let structured = weingarten_protected_dimensions(&ch, WeingartenCombiners::IdentityDft)?;
    let random = weingarten_protected_dimensions(&ch, WeingartenCombiners::Random)?;
    println!("protected dimensions: identity/DFT {structured:?}, random {random:?} (of 10)");

    let (scheme, ledger) = build_weingarten_baseline(&ch)?;
    let sweep = zf_rate_sweep(&ch, &scheme, &default_power_grid())?;
    println!("ledger pass {}, claimed DoF {}, slope {:.3}", ledger.all_pass(), scheme.dof_claimed, sweep.fit.slope);
    Ok(())
}
