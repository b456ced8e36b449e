//! Mutual inductance between one transmit and one receive coil as the
//! receive ring slides sideways, closed form against numeric integration.

use oamnfc::geometry::LinkGeometry;
use oamnfc::inductance::{mutual_tx_rx, InductanceMethod};

fn main() -> oamnfc::Result<()> {
    println!("{:>6} {:>14} {:>14} {:>10}", "d_x mm", "elliptic nH", "neumann nH", "rel err");
    for dx in [0.0, 5.0, 10.0, 15.0, 20.0] {
        let g = LinkGeometry { offset_x: dx * 1e-3, ..LinkGeometry::baseline() };
        let a = mutual_tx_rx(&g, 1, 1, InductanceMethod::Elliptic)?;
        let b = mutual_tx_rx(&g, 1, 1, InductanceMethod::Neumann)?;
        println!("{dx:>6.1} {:>14.6} {:>14.6} {:>10.2e}", a * 1e9, b * 1e9, ((a - b) / b).abs());
    }
    Ok(())
}
