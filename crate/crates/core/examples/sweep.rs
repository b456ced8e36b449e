//! Runs a named recipe and a hand-built two-axis sweep, writing CSV and JSON.
//!
//! `cargo run --example sweep -- out_dir`

use oamnfc::config::SimulationConfig;
use oamnfc::harness::{recipe, run_sweep, Axis, Metric, SweepSpec};

fn main() -> oamnfc::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| std::env::temp_dir().display().to_string());
    std::fs::create_dir_all(&dir)?;

    let fig = run_sweep(&recipe("sweep_D")?)?;
    fig.write(format!("{dir}/sweep_D.csv"))?;
    println!("sweep_D: {} rows", fig.rows.len());

    let mut base = SimulationConfig::default();
    base.set("R", 40.0)?;
    let spec = SweepSpec {
        name: "tilt_vs_offset".into(),
        base,
        axes: vec![Axis::new("theta_y", 0.0, 30.0, 10.0), Axis::new("d_y", 0.0, 10.0, 5.0)],
        metrics: vec![Metric::CapacityOam, Metric::CapacityLs, Metric::CirculantResidual],
        trials: 1,
        seed: 0,
    };
    let r = run_sweep(&spec)?;
    r.write(format!("{dir}/tilt_vs_offset.json"))?;
    print!("{}", r.to_csv());
    Ok(())
}
