//! Capacity of every scheme on the baseline link over SNR.

use oamnfc::channel::ChannelMatrix;
use oamnfc::geometry::LinkGeometry;
use oamnfc::inductance::{coil_electrical, InductanceMethod};
use oamnfc::metrics::{capacity_ls, capacity_mimo, capacity_oam, capacity_siso, default_correlation};
use oamnfc::txrx::LinkBudget;

fn main() -> oamnfc::Result<()> {
    let g = LinkGeometry::baseline();
    let elec = coil_electrical(&g, 13.56e6, 13.35e6, 1.75e-8, 5e-8)?;
    let ch = ChannelMatrix::analytic(&g, &elec, InductanceMethod::Elliptic, true)?;
    let (gt, gr) = default_correlation(&g, InductanceMethod::Elliptic)?;

    println!("{:>6} {:>8} {:>8} {:>8} {:>8} {:>8}", "SNR", "OAM", "LS", "SISO", "MIMO", "MIMO-WF");
    for snr in (0..=30).step_by(5) {
        let b = LinkBudget::default().at_snr_db(snr as f64);
        println!(
            "{snr:>6} {:>8.3} {:>8.3} {:>8.3} {:>8.3} {:>8.3}",
            capacity_oam(&ch, &b)?.total_bits,
            capacity_ls(&ch, &ch.h, &b)?.total_bits,
            capacity_siso(&g, &elec, &b)?,
            capacity_mimo(&ch, &b, &gt, &gr, false)?.total_bits,
            capacity_mimo(&ch, &b, &gt, &gr, true)?.total_bits,
        );
    }
    Ok(())
}
