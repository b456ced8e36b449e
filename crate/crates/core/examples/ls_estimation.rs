//! Zadoff-Chu pilots and least-squares channel estimation on a misaligned
//! link; estimation error against pilot SNR.

use oamnfc::channel::ChannelMatrix;
use oamnfc::geometry::LinkGeometry;
use oamnfc::inductance::{coil_electrical, InductanceMethod};
use oamnfc::txrx::{estimate_channel_ls, gram_residual, zc_pilot, PilotConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> oamnfc::Result<()> {
    let g = LinkGeometry { offset_x: 8e-3, ..LinkGeometry::baseline() };
    let elec = coil_electrical(&g, 13.56e6, 13.35e6, 1.75e-8, 5e-8)?;
    let ch = ChannelMatrix::analytic(&g, &elec, InductanceMethod::Elliptic, true)?;
    let pilot = zc_pilot(&PilotConfig::default(), g.n_tx)?;
    println!("pilot {}x{}, orthogonality residual {:.1e}", pilot.nrows(), pilot.ncols(), gram_residual(&pilot));

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h2 = ch.h.norm_squared();
    for db in [0.0, 10.0, 20.0, 30.0, 40.0] {
        let cfg = PilotConfig::default().with_snr_db(db);
        let err: f64 = (0..200).map(|_| (estimate_channel_ls(&ch, &cfg, &mut rng).unwrap() - &ch.h).norm_squared()).sum::<f64>() / 200.0;
        println!("pilot SNR {db:>4} dB: normalized error {:.3e}", err / h2);
    }
    Ok(())
}
