//! TOML simulation config with human units (mm, degrees, MHz, W, dB).
//!
//! ```toml
//! [geometry]
//! n_tx = 8
//! n_rx = 8
//! ring_radius_tx_mm = 25.0
//! ring_radius_rx_mm = 25.0
//! coil_radius_tx_mm = 5.0
//! coil_radius_rx_mm = 5.0
//! turns_tx = 1
//! turns_rx = 1
//! axial_distance_mm = 25.0
//! offset_x_mm = 0.0
//! offset_y_mm = 0.0
//! tilt_x_deg = 0.0
//! tilt_y_deg = 0.0
//!
//! [electrical]
//! frequency_mhz = 13.56
//! resonance_mhz = 13.35
//! resistivity_ohm_mm2_per_m = 0.0175
//! wire_cross_section_mm2 = 0.05
//! # inductance_uh, capacitance_pf, resistance_ohm override the derived values
//!
//! [budget]
//! tx_power_w = 8.0
//! noise_power_w = 0.08
//! snr_db = [0.0, 10.0, 20.0]
//!
//! [pilot]
//! length = 17
//! root = 1
//! snr_db = 40.0
//!
//! [flags]
//! crosstalk = true
//! inductance_method = "elliptic"
//! detector = "both"
//! mimo_correlation = "coupling"
//! estimated_csi = false
//! ```
//!
//! Every section and key is optional and defaults to the baseline above.
//! Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::LinkGeometry;
use crate::inductance::{coil_electrical, CoilElectrical, InductanceMethod};
use crate::txrx::{LinkBudget, PilotConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub n_tx: usize,
    pub n_rx: usize,
    pub ring_radius_tx_mm: f64,
    pub ring_radius_rx_mm: f64,
    pub coil_radius_tx_mm: f64,
    pub coil_radius_rx_mm: f64,
    pub turns_tx: u32,
    pub turns_rx: u32,
    pub axial_distance_mm: f64,
    pub offset_x_mm: f64,
    pub offset_y_mm: f64,
    pub tilt_x_deg: f64,
    pub tilt_y_deg: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        GeometrySection::from_geometry(&LinkGeometry::baseline())
    }
}

impl GeometrySection {
    pub fn from_geometry(g: &LinkGeometry) -> Self {
        GeometrySection {
            n_tx: g.n_tx,
            n_rx: g.n_rx,
            ring_radius_tx_mm: g.ring_radius_tx * 1e3,
            ring_radius_rx_mm: g.ring_radius_rx * 1e3,
            coil_radius_tx_mm: g.coil_radius_tx * 1e3,
            coil_radius_rx_mm: g.coil_radius_rx * 1e3,
            turns_tx: g.turns_tx,
            turns_rx: g.turns_rx,
            axial_distance_mm: g.axial_distance * 1e3,
            offset_x_mm: g.offset_x * 1e3,
            offset_y_mm: g.offset_y * 1e3,
            tilt_x_deg: g.tilt_x.to_degrees(),
            tilt_y_deg: g.tilt_y.to_degrees(),
        }
    }

    /// SI geometry; not yet validated.
    pub fn to_geometry(&self) -> LinkGeometry {
        LinkGeometry {
            n_tx: self.n_tx,
            n_rx: self.n_rx,
            ring_radius_tx: self.ring_radius_tx_mm * 1e-3,
            ring_radius_rx: self.ring_radius_rx_mm * 1e-3,
            coil_radius_tx: self.coil_radius_tx_mm * 1e-3,
            coil_radius_rx: self.coil_radius_rx_mm * 1e-3,
            turns_tx: self.turns_tx,
            turns_rx: self.turns_rx,
            axial_distance: self.axial_distance_mm * 1e-3,
            offset_x: self.offset_x_mm * 1e-3,
            offset_y: self.offset_y_mm * 1e-3,
            tilt_x: self.tilt_x_deg.to_radians(),
            tilt_y: self.tilt_y_deg.to_radians(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ElectricalSection {
    pub frequency_mhz: f64,
    pub resonance_mhz: f64,
    pub resistivity_ohm_mm2_per_m: f64,
    pub wire_cross_section_mm2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inductance_uh: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capacitance_pf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resistance_ohm: Option<f64>,
}

impl Default for ElectricalSection {
    fn default() -> Self {
        ElectricalSection {
            frequency_mhz: 13.56,
            resonance_mhz: 13.35,
            resistivity_ohm_mm2_per_m: 0.0175,
            wire_cross_section_mm2: 0.05,
            inductance_uh: None,
            capacitance_pf: None,
            resistance_ohm: None,
        }
    }
}

impl ElectricalSection {
    /// Lumped model of the transmit coil of `geom`, with any overrides applied.
    pub fn resolve(&self, geom: &LinkGeometry) -> Result<CoilElectrical> {
        let derived = coil_electrical(
            geom,
            self.frequency_mhz * 1e6,
            self.resonance_mhz * 1e6,
            self.resistivity_ohm_mm2_per_m * 1e-6,
            self.wire_cross_section_mm2 * 1e-6,
        )?;
        if self.inductance_uh.is_none() && self.capacitance_pf.is_none() && self.resistance_ohm.is_none() {
            return Ok(derived);
        }
        let mut e = CoilElectrical::from_lumped(
            derived.frequency,
            self.inductance_uh.map_or(derived.self_inductance, |v| v * 1e-6),
            self.capacitance_pf.map_or(derived.capacitance, |v| v * 1e-12),
            self.resistance_ohm.unwrap_or(derived.resistance),
        )?;
        e.resistivity = derived.resistivity;
        e.wire_cross_section = derived.wire_cross_section;
        Ok(e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetSection {
    pub tx_power_w: f64,
    pub noise_power_w: f64,
    pub snr_db: Vec<f64>,
}

impl Default for BudgetSection {
    fn default() -> Self {
        BudgetSection { tx_power_w: 8.0, noise_power_w: 0.08, snr_db: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PilotSection {
    pub length: usize,
    pub root: usize,
    pub snr_db: f64,
}

impl Default for PilotSection {
    fn default() -> Self {
        PilotSection { length: 17, root: 1, snr_db: 40.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorChoice {
    Blind,
    Ls,
    Both,
}

impl DetectorChoice {
    pub fn blind(self) -> bool {
        matches!(self, DetectorChoice::Blind | DetectorChoice::Both)
    }

    pub fn ls(self) -> bool {
        matches!(self, DetectorChoice::Ls | DetectorChoice::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationModel {
    /// `I + |coupling|/L` projected to a unit-diagonal PSD matrix.
    Coupling,
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlagsSection {
    pub crosstalk: bool,
    pub inductance_method: InductanceMethod,
    pub detector: DetectorChoice,
    pub mimo_correlation: CorrelationModel,
    /// Use a pilot-based estimate instead of the true channel for LS metrics.
    pub estimated_csi: bool,
}

impl Default for FlagsSection {
    fn default() -> Self {
        FlagsSection {
            crosstalk: true,
            inductance_method: InductanceMethod::Elliptic,
            detector: DetectorChoice::Both,
            mimo_correlation: CorrelationModel::Coupling,
            estimated_csi: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationConfig {
    pub geometry: GeometrySection,
    pub electrical: ElectricalSection,
    pub budget: BudgetSection,
    pub pilot: PilotSection,
    pub flags: FlagsSection,
}

/// Everything needed to evaluate one operating point, in SI units.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub geometry: LinkGeometry,
    pub electrical: CoilElectrical,
    pub budget: LinkBudget,
    pub pilot: PilotConfig,
    pub flags: FlagsSection,
}

impl SimulationConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: SimulationConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable in TOML")
    }

    /// Resolves the config and checks every section.
    pub fn validate(&self) -> Result<()> {
        self.scenario().map(|_| ()).map_err(|e| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        })
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let geometry = self.geometry.to_geometry().checked()?;
        let electrical = self.electrical.resolve(&geometry)?;
        let budget = LinkBudget {
            total_tx_power: self.budget.tx_power_w,
            noise_power: self.budget.noise_power_w,
            snr_grid: self.budget.snr_db.clone(),
        };
        budget.validate()?;
        if budget.snr_grid.iter().any(|s| !s.is_finite()) {
            return Err(Error::Config("budget.snr_db entries must be finite".into()));
        }
        let pilot = PilotConfig { length: self.pilot.length, root: self.pilot.root, pilot_snr: 1.0 }
            .with_snr_db(self.pilot.snr_db);
        crate::txrx::zc_pilot(&pilot, 1)?;
        Ok(Scenario { geometry, electrical, budget, pilot, flags: self.flags.clone() })
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let hash = Sha256::digest(json.as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Canonical names accepted by [`SimulationConfig::set`], with units.
    pub const PARAMETERS: &'static [(&'static str, &'static str)] = &[
        ("n_tx", "count"),
        ("n_rx", "count"),
        ("n", "count, both rings"),
        ("ring_radius_tx", "mm"),
        ("ring_radius_rx", "mm"),
        ("ring_radius", "mm, both rings"),
        ("coil_radius_tx", "mm"),
        ("coil_radius_rx", "mm"),
        ("coil_radius", "mm, both rings"),
        ("turns_tx", "count"),
        ("turns_rx", "count"),
        ("axial_distance", "mm"),
        ("offset_x", "mm"),
        ("offset_y", "mm"),
        ("tilt_x", "deg"),
        ("tilt_y", "deg"),
        ("frequency", "MHz"),
        ("snr", "dB, sets noise power from transmit power"),
        ("tx_power", "W"),
        ("pilot_snr", "dB"),
    ];

    /// Maps short symbols such as `d_x`, `theta_x`, `N_t` to canonical names.
    pub fn canonical_parameter(name: &str) -> Option<&'static str> {
        let c = match name {
            "N_t" | "geometry.n_tx" => "n_tx",
            "N_r" | "geometry.n_rx" => "n_rx",
            "N" => "n",
            "R_t" | "geometry.ring_radius_tx_mm" => "ring_radius_tx",
            "R_r" | "geometry.ring_radius_rx_mm" => "ring_radius_rx",
            "R" => "ring_radius",
            "r_t" | "geometry.coil_radius_tx_mm" => "coil_radius_tx",
            "r_r" | "geometry.coil_radius_rx_mm" => "coil_radius_rx",
            "r" => "coil_radius",
            "K_t" | "geometry.turns_tx" => "turns_tx",
            "K_r" | "geometry.turns_rx" => "turns_rx",
            "D" | "geometry.axial_distance_mm" => "axial_distance",
            "d_x" | "geometry.offset_x_mm" => "offset_x",
            "d_y" | "geometry.offset_y_mm" => "offset_y",
            "theta_x" | "geometry.tilt_x_deg" => "tilt_x",
            "theta_y" | "geometry.tilt_y_deg" => "tilt_y",
            "f" | "electrical.frequency_mhz" => "frequency",
            "snr_db" => "snr",
            "P_t" | "budget.tx_power_w" => "tx_power",
            "pilot.snr_db" => "pilot_snr",
            other => return Self::PARAMETERS.iter().find(|(p, _)| *p == other).map(|(p, _)| *p),
        };
        Some(c)
    }

    /// Overwrites one parameter; counts are rounded to the nearest integer.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let canon = Self::canonical_parameter(name)
            .ok_or_else(|| Error::Config(format!("unknown parameter '{name}'")))?;
        let count = || -> Result<usize> {
            if value.is_finite() && value >= 0.0 {
                Ok(value.round() as usize)
            } else {
                Err(Error::Config(format!("{name} must be a non-negative count, got {value}")))
            }
        };
        let g = &mut self.geometry;
        match canon {
            "n_tx" => g.n_tx = count()?,
            "n_rx" => g.n_rx = count()?,
            "n" => {
                g.n_tx = count()?;
                g.n_rx = g.n_tx;
            }
            "ring_radius_tx" => g.ring_radius_tx_mm = value,
            "ring_radius_rx" => g.ring_radius_rx_mm = value,
            "ring_radius" => {
                g.ring_radius_tx_mm = value;
                g.ring_radius_rx_mm = value;
            }
            "coil_radius_tx" => g.coil_radius_tx_mm = value,
            "coil_radius_rx" => g.coil_radius_rx_mm = value,
            "coil_radius" => {
                g.coil_radius_tx_mm = value;
                g.coil_radius_rx_mm = value;
            }
            "turns_tx" => g.turns_tx = count()? as u32,
            "turns_rx" => g.turns_rx = count()? as u32,
            "axial_distance" => g.axial_distance_mm = value,
            "offset_x" => g.offset_x_mm = value,
            "offset_y" => g.offset_y_mm = value,
            "tilt_x" => g.tilt_x_deg = value,
            "tilt_y" => g.tilt_y_deg = value,
            "frequency" => self.electrical.frequency_mhz = value,
            "snr" => self.budget.noise_power_w = self.budget.tx_power_w / 10f64.powf(value / 10.0),
            "tx_power" => self.budget.tx_power_w = value,
            "pilot_snr" => self.pilot.snr_db = value,
            _ => unreachable!("every canonical name is handled"),
        }
        Ok(())
    }
}
