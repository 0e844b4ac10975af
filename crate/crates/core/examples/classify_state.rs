//! Steering-hierarchy verdicts for a few members of the biased family.
//!
//! `cargo run --release --example classify_state -- [mesh]`

use steerkit::states::{family_state, FamilyParams};
use steerkit::steering::{classify, fibonacci_mesh};

fn main() -> steerkit::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    let mesh = fibonacci_mesh(n)?;
    for (p, r) in [(1.0, 0.0), (0.2, 0.5), (0.6, 0.3), (0.43, 0.85), (0.46, 0.92)] {
        let rho = family_state(FamilyParams::new(p, r)?);
        let v = classify(&rho, &mesh)?;
        let verified = v.verify(rho.matrix(), &mesh, 1e-8)?;
        println!(
            "p={p:.2} r={r:.2}: {:<20} A→B {:<22} B→A {:<22} verified {verified}",
            v.label.name(),
            format!("{:?}", v.steerable_ab),
            format!("{:?}", v.steerable_ba),
        );
    }
    Ok(())
}
