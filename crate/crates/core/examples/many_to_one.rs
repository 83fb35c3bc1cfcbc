//! Four-user real interference network where only receiver 1 hears the other
//! transmitters; aligning their interference there yields 5 DoF in total.

use compound_align::channel::{sample_channel, CompoundScenario, Setting};
use compound_align::linear::build_many_to_one_demo;
use compound_align::sim::{default_power_grid, zf_rate_sweep};

fn main() -> compound_align::Result<()> {
    let mut scenario = CompoundScenario::ic(Setting::Real, vec![1, 1, 1, 1], 5);
    scenario.tx_antennas = 2;
    scenario.rx_antennas = 4;
    let ch = sample_channel(&scenario)?;
    let (scheme, ledger) = build_many_to_one_demo(&ch)?;
    let sweep = zf_rate_sweep(&ch, &scheme, &default_power_grid())?;
    println!("streams {:?}, ledger pass {}, slope {:.3}", scheme.streams, ledger.all_pass(), sweep.fit.slope);
    Ok(())
}
