//! Critical-radius brackets of Werner states across mesh sizes.
//!
//! `cargo run --release --example werner_bracket`

use steerkit::qmat::psi_plus;
use steerkit::steering::{critical_radius_bracket, fibonacci_mesh, Direction};
use steerkit::DensityMatrix;

fn main() -> steerkit::Result<()> {
    let singlet = DensityMatrix::pure(&psi_plus())?;
    println!("mesh  eta      lo       hi       verified");
    for n in [3, 6, 8, 10, 12] {
        let mesh = fibonacci_mesh(n)?;
        let b = critical_radius_bracket(&singlet, Direction::AtoB, &mesh, 20, 1e-9)?;
        let ok = b.verify(singlet.matrix(), &mesh, 1e-8)?;
        println!(
            "{n:>4}  {:.5}  {:.5}  {:.5}  {ok}",
            b.eta,
            b.lo,
            b.hi.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
