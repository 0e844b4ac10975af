//! Predicted one-way region of the θ-family as a text map.
//!
//! `cargo run --release --example bowles_grid`

use steerkit::cli::bowles_grid;

fn main() -> steerkit::Result<()> {
    let (nt, np) = (16, 41);
    let grid = bowles_grid(nt, np)?;
    println!("rows θ = 0 → π/4, columns p = 0 → 1; * predicted one-way");
    for row in grid.chunks(np) {
        let line: String = row.iter().map(|c| if c.2 { '*' } else { '.' }).collect();
        println!("θ={:.3} {line}", row[0].0);
    }
    Ok(())
}
