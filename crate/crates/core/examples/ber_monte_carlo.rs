//! Monte Carlo BER of the blind and LS receivers next to the closed form.

use oamnfc::channel::ChannelMatrix;
use oamnfc::geometry::LinkGeometry;
use oamnfc::inductance::{coil_electrical, InductanceMethod};
use oamnfc::txrx::{run_ber, BerDetector, BerOptions, LinkBudget, PilotConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> oamnfc::Result<()> {
    let g = LinkGeometry { offset_x: 4e-3, ..LinkGeometry::baseline() };
    let elec = coil_electrical(&g, 13.56e6, 13.35e6, 1.75e-8, 5e-8)?;
    let ch = ChannelMatrix::analytic(&g, &elec, InductanceMethod::Elliptic, true)?;
    let budget = LinkBudget { snr_grid: vec![0.0, 10.0, 20.0, 30.0], ..LinkBudget::default() };
    let opts = BerOptions { bits_per_point: 200_000, ..BerOptions::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    let detectors = [
        ("blind", BerDetector::Blind { gains: None }),
        ("ls", BerDetector::Ls { pilot: PilotConfig::default() }),
    ];
    for (name, det) in detectors {
        for p in run_ber(&ch, &budget, &det, &opts, &mut rng)? {
            let a = p.analytic.map_or("-".to_string(), |a| format!("{a:.3e}"));
            println!("{name:>5} {:>4} dB: {:.3e} [{:.3e}, {:.3e}] closed form {a}", p.snr_db, p.ber, p.ci_low, p.ci_high);
        }
    }
    Ok(())
}
