//! Writes a 16-port S-parameter CSV for the baseline link, reads it back and
//! evaluates the imported channel.

use num_complex::Complex64;
use oamnfc::channel::{import_s_parameters, ChannelMatrix, SParameterDocument};
use oamnfc::cli::evaluate_imported;
use oamnfc::config::SimulationConfig;
use oamnfc::geometry::LinkGeometry;
use oamnfc::inductance::{coil_electrical, InductanceMethod};

fn main() -> oamnfc::Result<()> {
    let g = LinkGeometry::baseline();
    let elec = coil_electrical(&g, 13.56e6, 13.35e6, 1.75e-8, 5e-8)?;
    let ch = ChannelMatrix::analytic(&g, &elec, InductanceMethod::Elliptic, true)?;
    // reflections on the diagonal, nothing else outside the transmission block
    let doc = SParameterDocument::embedding(&ch.h, 13.56e6, |i, j| if i == j { Complex64::new(0.1, 0.0) } else { Complex64::new(0.0, 0.0) });
    let path = std::env::temp_dir().join("oamnfc_link.csv");
    doc.write(&path)?;

    let imported = import_s_parameters(&SParameterDocument::read(&path)?)?;
    println!("imported {}x{} channel, max deviation {:.1e}", imported.n_rx(), imported.n_tx(), (&imported.h - &ch.h).camax());
    let mut cfg = SimulationConfig::default();
    cfg.budget.snr_db = vec![10.0, 20.0];
    print!("{}", evaluate_imported(&imported, &cfg, 0)?.to_text());
    Ok(())
}
