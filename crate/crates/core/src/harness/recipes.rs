use super::{Axis, Metric, SweepSpec};
use crate::config::{DetectorChoice, SimulationConfig};
use crate::error::{Error, Result};

pub const RECIPES: &[&str] = &[
    "fig3a",
    "fig3b",
    "fig4a",
    "fig4b",
    "fig4c",
    "fig4d",
    "fig9",
    "fig10",
    "ber_curves",
    "sweep_misalign",
    "sweep_N",
    "sweep_D",
    "sweep_R",
    "sweep_r",
];

const LINE: usize = 51;
const SURFACE: usize = 26;

fn spec(name: &str, base: SimulationConfig, axes: Vec<Axis>, metrics: Vec<Metric>) -> SweepSpec {
    SweepSpec { name: name.to_string(), base, axes, metrics, trials: super::default_trials(), seed: 0 }
}

fn with_ring_radius(mm: f64) -> SimulationConfig {
    let mut c = SimulationConfig::default();
    c.set("R", mm).expect("known parameter");
    c
}

/// Named sweep over the baseline link: 13.56 MHz, 8 + 8 single-turn 5 mm
/// coils on 25 mm rings, 25 mm apart, 8 W transmit power, 0.08 W noise.
pub fn recipe(name: &str) -> Result<SweepSpec> {
    use Metric::*;
    let base = SimulationConfig::default;
    let misalign = || vec![Axis::linspace("d_x", 0.0, 25.0, SURFACE), Axis::linspace("theta_x", -60.0, 60.0, SURFACE - 1)];
    let counts = || vec![Axis::new("N_t", 1.0, 20.0, 1.0), Axis::new("N_r", 1.0, 20.0, 1.0)];
    let s = match name {
        "fig3a" => spec(name, base(), misalign(), vec![CapacityOam]),
        "fig3b" => spec(name, base(), misalign(), vec![CapacityLs]),
        "fig4a" => spec(name, with_ring_radius(50.0), counts(), vec![CapacityLs]),
        "fig4b" => spec(name, base(), vec![Axis::linspace("D", 0.0, 50.0, LINE)], vec![CapacityLs]),
        "fig4c" => spec(
            name,
            base(),
            vec![Axis::linspace("R_t", 20.0, 100.0, SURFACE), Axis::linspace("R_r", 20.0, 100.0, SURFACE)],
            vec![CapacityLs],
        ),
        "fig4d" => spec(
            name,
            with_ring_radius(15.0),
            vec![Axis::linspace("r_t", 0.0, 15.0, SURFACE), Axis::linspace("r_r", 0.0, 15.0, SURFACE)],
            vec![CapacityLs],
        ),
        "fig9" => spec(
            name,
            base(),
            vec![Axis::linspace("snr_db", 0.0, 25.0, LINE)],
            vec![CapacityOam, CapacityLs, CapacitySiso, CapacityMimo, CapacityMimoWf],
        ),
        "fig10" => spec(name, with_ring_radius(50.0), counts(), vec![CapacityGap]),
        "ber_curves" => {
            let mut b = base();
            b.flags.detector = DetectorChoice::Both;
            spec(name, b, vec![Axis::new("snr_db", 0.0, 30.0, 1.0)], vec![BerAnalytic, BerMc])
        }
        "sweep_misalign" => spec(
            name,
            base(),
            vec![Axis::linspace("d_x", 0.0, 25.0, LINE)],
            vec![CapacityOam, CapacityLs, CapacitySiso, CirculantResidual],
        ),
        "sweep_N" => spec(
            name,
            with_ring_radius(50.0),
            vec![Axis::new("N", 1.0, 20.0, 1.0)],
            vec![CapacityOam, CapacityLs, CapacitySiso, Bounds],
        ),
        "sweep_D" => spec(name, base(), vec![Axis::linspace("D", 5.0, 50.0, LINE)], vec![CapacityOam, CapacityLs, Bounds]),
        "sweep_R" => spec(name, base(), vec![Axis::linspace("R", 20.0, 100.0, LINE)], vec![CapacityOam, CapacityLs, Bounds]),
        "sweep_r" => spec(
            name,
            with_ring_radius(15.0),
            vec![Axis::linspace("r_r", 0.0, 15.0, LINE)],
            vec![CapacityOam, CapacityLs, Bounds],
        ),
        other => {
            return Err(Error::Sweep(format!("unknown recipe '{other}', expected one of {}", RECIPES.join(", "))))
        }
    };
    Ok(s)
}
