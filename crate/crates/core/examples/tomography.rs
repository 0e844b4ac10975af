//! Counts at increasing statistics, reconstructed and bootstrapped.
//!
//! `cargo run --release --example tomography`

use steerkit::expsim::{analyze_counts, simulate_counts, DetectorConfig};
use steerkit::states::{family_state, FamilyParams};

fn main() -> steerkit::Result<()> {
    let target = FamilyParams::new(0.4078, 0.859)?;
    let rho = family_state(target);
    let det = DetectorConfig::default();
    println!("counts     fidelity  p_hat    sigma_p  r_hat    sigma_r");
    for duration in [2.0, 20.0, 200.0, 2000.0] {
        let counts = simulate_counts(&rho, &det, duration, 1)?;
        let (_, res) = analyze_counts(&counts, Some(target), 20, 1)?;
        println!(
            "{:>9}  {:.6}  {:.4}   {:.4}   {:.4}   {:.4}",
            res.total_counts,
            res.fidelity_to_target,
            res.retrieved.p,
            res.bootstrap_sigma_p,
            res.retrieved.r,
            res.bootstrap_sigma_r
        );
    }
    Ok(())
}
