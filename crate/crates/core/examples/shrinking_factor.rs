//! Inradius of the measurement polytope for every supported mesh size.
//!
//! `cargo run --release --example shrinking_factor`

use steerkit::steering::{fibonacci_mesh, shrinking_factor, MAX_DIRECTIONS};

fn main() -> steerkit::Result<()> {
    println!("n   eta");
    for n in 3..=MAX_DIRECTIONS {
        println!("{n:<3} {:.6}", shrinking_factor(&fibonacci_mesh(n)?)?);
    }
    Ok(())
}
