//! Noiseless PAM constellation at one receiver: minimum distance between
//! points with different desired data, and what a forced coefficient tie does.

use compound_align::channel::{sample_channel, CompoundScenario, Setting};
use compound_align::rational::build_ic_scheme;
use compound_align::sim::{pam_constellation_probe, ENUM_LIMIT};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

fn main() -> compound_align::Result<()> {
    let eps = BigRational::new(BigInt::from(1), BigInt::from(10));
    let ch = sample_channel(&CompoundScenario::ic(Setting::Real, vec![1, 1], 3))?;
    let (scheme, _) = build_ic_scheme(&ch, 1, &eps)?;
    for p in [1e2, 1e3, 1e4, 1e5] {
        let probe = pam_constellation_probe(&scheme, 0, 0, p, 11, ENUM_LIMIT)?;
        println!(
            "P={p:>6.0e}: levels +/-{}, {} points, d_min {:.4}, error bound {:.3e}",
            probe.max_level, probe.points, probe.min_distance, probe.decode_error
        );
    }

    let mut tied = ch.clone();
    let cross = ch.channel(0, 0)[(0, 1)];
    tied.set_entry(0, 0, 0, 0, Complex64::new(cross.re, 0.0));
    let (scheme, ledger) = build_ic_scheme(&tied, 1, &eps)?;
    let probe = pam_constellation_probe(&scheme, 0, 0, 1e3, 11, ENUM_LIMIT)?;
    println!(
        "direct link tied to cross link: d_min {}, failing checks {:?}",
        probe.min_distance,
        ledger.summary().failing
    );
    Ok(())
}
