//! The four MIMO broadcast examples (4x2 and 6x3 antennas, 3 or 4 states),
//! plus the structured channel family on which the 4-state recipe breaks.

use compound_align::channel::{sample_channel, CompoundScenario, Setting};
use compound_align::linear::{build_mimo_bc_scheme, MimoBcChannel};
use compound_align::sim::{default_power_grid, zf_rate_sweep};

fn main() -> compound_align::Result<()> {
    let grid = default_power_grid();
    for (example, tx, rx, j) in
        [(1u8, 4, 2, vec![1, 3]), (2, 6, 3, vec![3, 3]), (3, 4, 2, vec![1, 4]), (4, 6, 3, vec![4, 4])]
    {
        let ch = sample_channel(&CompoundScenario::mimo_bc(Setting::Complex, tx, rx, j.clone(), 1))?;
        let (scheme, ledger) = build_mimo_bc_scheme(&ch, example, MimoBcChannel::ComplexGeneric)?;
        let slope = zf_rate_sweep(&ch, &scheme, &grid)?.fit.slope;
        println!(
            "example {example} ({tx}x{rx}, J={j:?}): streams {:?}, ledger {}, slope {slope:.3}",
            scheme.streams,
            ledger.all_pass()
        );
    }

    let ch = sample_channel(&CompoundScenario::bc(Setting::Complex, 2, vec![4, 4], 1))?;
    match build_mimo_bc_scheme(&ch, 4, MimoBcChannel::Structured) {
        Err(e) => println!("structured 4-state channel: {} ({e})", e.code()),
        Ok(_) => println!("structured 4-state channel unexpectedly produced a scheme"),
    }
    Ok(())
}
