//! Sends BPSK over the OAM modes and detects with the channel's circulant
//! gains alone, no training.

use oamnfc::channel::ChannelMatrix;
use oamnfc::geometry::LinkGeometry;
use oamnfc::inductance::{coil_electrical, InductanceMethod};
use oamnfc::linalg::CVec;
use oamnfc::txrx::{propagate, BlindDetector, Constellation, DftOperator, LinkBudget};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> oamnfc::Result<()> {
    let g = LinkGeometry::baseline();
    let elec = coil_electrical(&g, 13.56e6, 13.35e6, 1.75e-8, 5e-8)?;
    let ch = ChannelMatrix::analytic(&g, &elec, InductanceMethod::Elliptic, true)?;
    let det = BlindDetector::from_channel(&ch)?;
    let w = DftOperator::new(g.n_tx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    for snr in [10.0, 20.0, 30.0] {
        let b = LinkBudget::default().at_snr_db(snr);
        let amp = (b.total_tx_power / g.n_tx as f64).sqrt();
        let tx = Constellation::bpsk().scaled(amp);
        let (mut errors, mut sent) = (0, 0);
        for _ in 0..2000 {
            let x = CVec::from_fn(g.n_tx, |_, _| tx.random(&mut rng));
            let v = propagate(&ch, &w.excite(&x)?, b.noise_power, &mut rng)?;
            let d = det.detect(&v, &tx)?;
            errors += d.symbols.iter().zip(x.iter()).filter(|(s, xi)| **s != Some(**xi)).count();
            sent += g.n_tx;
        }
        println!("SNR {snr:>4} dB: {errors} / {sent} symbol errors");
    }
    Ok(())
}
