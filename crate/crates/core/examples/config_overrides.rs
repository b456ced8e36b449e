//! Loads a TOML config, applies parameter overrides by their short names
//! and prints the resolved link.

use oamnfc::config::SimulationConfig;

const TOML: &str = r#"
[geometry]
n_rx = 16
coil_radius_rx_mm = 3.0
offset_x_mm = 2.0

[budget]
snr_db = [10.0, 20.0]
"#;

fn main() -> oamnfc::Result<()> {
    let mut cfg = SimulationConfig::parse(TOML)?;
    cfg.set("D", 15.0)?;
    cfg.set("theta_x", 5.0)?;
    let s = cfg.scenario()?;
    println!("fold {:?}, deflection {:.2} deg", s.geometry.fold(), s.geometry.deflection().to_degrees());
    println!("L = {:.3} uH, C = {:.2} pF", s.electrical.self_inductance * 1e6, s.electrical.capacitance * 1e12);
    println!("sha256 {}", cfg.digest());
    print!("{}", cfg.to_toml());
    Ok(())
}
