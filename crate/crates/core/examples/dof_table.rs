//! Closed-form DoF across network shapes, with the conjectured values they beat.

use compound_align::channel::Setting;
use compound_align::dof::{conjecture_values, dof_bc, dof_complex_x_via_real, dof_ic, dof_x};

fn main() {
    println!("real 2-user BC, M antennas, states (J1, J2):");
    for m in 2..=4 {
        for (j1, j2) in [(1, 1), (1, m), (1, m + 1), (m, m), (m + 1, m + 1)] {
            let d = dof_bc(m, &[j1, j2], Setting::Real).expect("supported");
            let c = conjecture_values(m, j1, j2);
            let conj = c.conj1.or(c.conj2).map(|v| format!("  conjectured {v}")).unwrap_or_default();
            println!("  M={m} J=({j1},{j2}): {d}{conj}");
        }
    }
    println!(
        "complex BC M=2: J=(1,3) -> {}, J=(3,3) -> {}",
        dof_bc(2, &[1, 3], Setting::Complex).unwrap(),
        dof_bc(2, &[3, 3], Setting::Complex).unwrap()
    );
    println!("X network MxN:");
    for m in 2..=4 {
        let row: Vec<String> = (2..=4).map(|n| dof_x(m, n).to_string()).collect();
        println!("  M={m}: {}", row.join("  "));
    }
    println!("interference channel K=2..6: {}", (2..=6).map(|k| dof_ic(k).to_string()).collect::<Vec<_>>().join("  "));
    for m in [2, 3, 4, 8] {
        let (d, exceeds) = dof_complex_x_via_real(m);
        println!("complex Mx2 X network with real signals, M={m}: {d} (above 1: {exceeds})");
    }
}
