//! Closed-form capacity of a coaxial link and its lower and upper bounds
//! as the rings move apart.

use oamnfc::geometry::LinkGeometry;
use oamnfc::inductance::coil_electrical;
use oamnfc::metrics::{capacity_bounds, capacity_oam_simplified};
use oamnfc::txrx::LinkBudget;

fn main() -> oamnfc::Result<()> {
    let b = LinkBudget::default();
    println!("{:>5} {:>10} {:>10} {:>10}", "D mm", "lower", "capacity", "upper");
    for d in [5.0, 10.0, 20.0, 30.0, 50.0] {
        let g = LinkGeometry { axial_distance: d * 1e-3, ..LinkGeometry::baseline() };
        let elec = coil_electrical(&g, 13.56e6, 13.35e6, 1.75e-8, 5e-8)?;
        let c = capacity_oam_simplified(&g, &elec, &b)?.total_bits;
        let (lo, hi) = capacity_bounds(&g, &elec, &b)?;
        println!("{d:>5} {lo:>10.4} {c:>10.4} {hi:>10.4}");
    }
    Ok(())
}
