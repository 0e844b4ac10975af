//! Coarse text map of the hierarchy over the (p, r) square.
//!
//! `cargo run --release --example region_scan`

use steerkit::steering::{fibonacci_mesh, region_scan, unit_grid, HierarchyLabel};

fn main() -> steerkit::Result<()> {
    let grid = unit_grid(21);
    let cells = region_scan(&grid, &grid, &fibonacci_mesh(6)?)?;
    println!("rows r = 1 → 0, columns p = 0 → 1");
    println!("S separable, . two-way unsteerable, > one-way A→B, < one-way B→A, # two-way, ? indeterminate");
    for row in cells.chunks(21).rev() {
        let line: String = row
            .iter()
            .map(|c| match c.label {
                HierarchyLabel::Separable => 'S',
                HierarchyLabel::TwoWayUnsteerable => '.',
                HierarchyLabel::OneWayAToB => '>',
                HierarchyLabel::OneWayBToA => '<',
                HierarchyLabel::TwoWaySteerable => '#',
                HierarchyLabel::Indeterminate => '?',
            })
            .collect();
        println!("r={:.2} {line}", row[0].r);
    }
    Ok(())
}
