//! Builds the coil-to-coil channel, folds it to N_t x N_t and shows that the
//! DFT diagonalizes it only while the rings stay coaxial.

use oamnfc::channel::{circulant_residual, reduce_channel, ChannelMatrix};
use oamnfc::geometry::LinkGeometry;
use oamnfc::inductance::{coil_electrical, InductanceMethod};
use oamnfc::txrx::DftOperator;

fn main() -> oamnfc::Result<()> {
    let base = LinkGeometry::baseline();
    let cases = [
        ("aligned", base),
        ("d_x = 10 mm", LinkGeometry { offset_x: 10e-3, ..base }),
        ("theta_x = 10 deg", LinkGeometry { tilt_x: 10f64.to_radians(), ..base }),
        ("8 -> 16 coils", LinkGeometry { n_rx: 16, coil_radius_rx: 3e-3, ..base }),
    ];
    for (label, g) in cases {
        let elec = coil_electrical(&g, 13.56e6, 13.35e6, 1.75e-8, 5e-8)?;
        let ch = ChannelMatrix::analytic(&g, &elec, InductanceMethod::Elliptic, true)?;
        let reduced = reduce_channel(&ch)?;
        let modes = DftOperator::new(g.n_tx)?.to_mode_domain(&reduced.h_hat)?;
        let diag: f64 = (0..g.n_tx).map(|i| modes[(i, i)].norm_sqr()).sum();
        let leak = modes.norm_squared() - diag;
        println!("{label:>18}: residual {:.2e}, off-diagonal mode power {:.2e}", circulant_residual(&reduced), leak / diag);
    }
    Ok(())
}
