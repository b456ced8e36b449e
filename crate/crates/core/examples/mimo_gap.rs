//! Capacity gap between OAM with LS detection and conventional MIMO over
//! the number of transmit and receive coils.

use oamnfc::geometry::LinkGeometry;
use oamnfc::metrics::capacity_gap_surface;
use oamnfc::txrx::LinkBudget;

fn main() -> oamnfc::Result<()> {
    let g = LinkGeometry { ring_radius_tx: 50e-3, ring_radius_rx: 50e-3, ..LinkGeometry::baseline() };
    let s = capacity_gap_surface(&g, &LinkBudget::default(), 8)?;
    let gap = s.column("capacity_gap").expect("gap column");
    print!("N_t\\N_r");
    for nr in 1..=8 {
        print!("{nr:>7}");
    }
    for (i, (row, v)) in s.rows.iter().zip(gap).enumerate() {
        if i % 8 == 0 {
            print!("\n{:>7}", row.coords[0]);
        }
        print!("{:>7}", v.map_or("-".into(), |v| format!("{v:.2}")));
    }
    println!();
    Ok(())
}
