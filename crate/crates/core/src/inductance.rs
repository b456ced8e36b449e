//! Mutual and self inductance of filamentary circular coils, and the lumped
//! series-RLC model of a transmit coil.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elliptic::psi_standard;
use crate::error::{Error, Result};
use crate::geometry::{LinkGeometry, Vec3};
use crate::quadrature::{adaptive_quad_1d, adaptive_quad_2d, QuadOptions};

/// Vacuum permeability, H/m.
pub const MU0: f64 = 4e-7 * PI;

const SINGLE_TOL: f64 = 1e-12;
const DOUBLE_TOL: f64 = 1e-9;

/// How a mutual inductance entry is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InductanceMethod {
    /// Single elliptic-kernel integral in the `(d, z, θ)` pair parameters.
    #[default]
    Elliptic,
    /// Raw Neumann double integral in the same pair parameters (slow).
    Neumann,
    /// Line integral of the transmit loop's vector potential along the actual
    /// receive loop. Exact for any pose, including tilts whose axis is not
    /// perpendicular to the lateral displacement.
    VectorPotential,
}

/// Lumped electrical model of one transmit coil.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoilElectrical {
    /// Operating frequency, Hz.
    pub frequency: f64,
    pub self_inductance: f64,
    pub capacitance: f64,
    pub resistance: f64,
    /// Ω·m (equivalently Ω·m²/m).
    pub resistivity: f64,
    /// m².
    pub wire_cross_section: f64,
    pub impedance: Complex64,
}

impl CoilElectrical {
    /// Assembles `Z_t = R + 1/(jωC) + jωL_t` from explicit lumped values.
    pub fn from_lumped(frequency: f64, self_inductance: f64, capacitance: f64, resistance: f64) -> Result<Self> {
        for (name, v) in [
            ("frequency", frequency),
            ("self inductance", self_inductance),
            ("capacitance", capacitance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(resistance.is_finite() && resistance >= 0.0) {
            return Err(Error::Domain(format!("resistance must be non-negative, got {resistance}")));
        }
        let w = 2.0 * PI * frequency;
        let impedance = Complex64::new(resistance, w * self_inductance - 1.0 / (w * capacitance));
        if impedance.norm() == 0.0 {
            return Err(Error::Domain("coil impedance is zero".into()));
        }
        Ok(CoilElectrical {
            frequency,
            self_inductance,
            capacitance,
            resistance,
            resistivity: f64::NAN,
            wire_cross_section: f64::NAN,
            impedance,
        })
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI * self.frequency
    }

    /// Same coil driven at another frequency.
    pub fn at_frequency(&self, frequency: f64) -> Result<Self> {
        let mut e = Self::from_lumped(frequency, self.self_inductance, self.capacitance, self.resistance)?;
        e.resistivity = self.resistivity;
        e.wire_cross_section = self.wire_cross_section;
        Ok(e)
    }
}

/// Self inductance of a small `turns`-turn loop, `μ0·K²·π·r/2`.
pub fn loop_self_inductance(radius: f64, turns: u32) -> f64 {
    MU0 * (turns as f64).powi(2) * PI * radius / 2.0
}

/// Derives `L_t` and `R` from the coil geometry and picks `C` so the series
/// branch resonates at `resonance_f`.
///
/// `resistivity` is in Ω·m and `cross_section` in m².
pub fn coil_electrical(
    geom: &LinkGeometry,
    f: f64,
    resonance_f: f64,
    resistivity: f64,
    cross_section: f64,
) -> Result<CoilElectrical> {
    for (name, v) in [
        ("frequency", f),
        ("resonance frequency", resonance_f),
        ("resistivity", resistivity),
        ("wire cross-section", cross_section),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    let l = loop_self_inductance(geom.coil_radius_tx, geom.turns_tx);
    let r = 2.0 * PI * geom.coil_radius_tx * geom.turns_tx as f64 * resistivity / cross_section;
    let wr = 2.0 * PI * resonance_f;
    let c = 1.0 / (wr * wr * l);
    let mut e = CoilElectrical::from_lumped(f, l, c, r)?;
    e.resistivity = resistivity;
    e.wire_cross_section = cross_section;
    Ok(e)
}

/// `M` (receive × transmit) and the transmit crosstalk matrix `Mᵗ`, henries.
#[derive(Debug, Clone, PartialEq)]
pub struct MutualInductanceMatrix {
    pub tx_rx: DMatrix<f64>,
    /// Symmetric, circulant, zero diagonal.
    pub tx_tx: DMatrix<f64>,
}

/// `Ψ(k)/(k·V^{3/2})` with its finite limit at `V = 0`.
fn kernel(rt: f64, rr: f64, v: f64, zeff: f64) -> Result<f64> {
    if v == 0.0 {
        // Ψ ~ πk⁴/32 and k² ∝ V, so the ratio tends to a constant.
        return Ok(PI / 4.0 * (rt * rr / (rt * rt + zeff * zeff)).powf(1.5));
    }
    let k = 2.0 * (rt * rr * v / ((rt + rr * v).powi(2) + zeff * zeff)).sqrt();
    if k >= 1.0 - crate::elliptic::SINGULAR_MARGIN {
        return Err(Error::Intersecting(format!("elliptic modulus {k} reaches 1")));
    }
    Ok(psi_standard(k) / (k * v.powf(1.5)))
}

/// Elliptic single-integral form for a receive loop whose centre is at
/// horizontal distance `d` from the transmit axis and height `z`, tilted by
/// `theta`.
fn elliptic_pair(rt: f64, rr: f64, kt: u32, kr: u32, d: f64, z: f64, theta: f64) -> Result<f64> {
    let (ct, st) = (theta.cos(), theta.sin());
    let q = d / rr;
    let mut failure = None;
    let est = adaptive_quad_1d(
        |phi| {
            let cp = phi.cos();
            let v2 = 1.0 + q * q - 2.0 * q * cp * ct - cp * cp * st * st;
            let v = v2.max(0.0).sqrt();
            match kernel(rt, rr, v, z - rr * cp * st) {
                Ok(kv) => (ct - q * cp) * kv,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        0.0,
        PI,
        QuadOptions { rel_tol: SINGLE_TOL, abs_tol: 0.0, max_evals: 200_000 },
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let pref = 2.0 * MU0 * kt as f64 * kr as f64 * (rt * rr).sqrt() / PI;
    Ok(pref * est?.value)
}

/// Neumann double integral in the same pair parameters as [`elliptic_pair`]:
/// receive loop centred at `(d, 0, z)` with normal `(−sin θ, 0, cos θ)`, so a
/// positive tilt leans the receive normal towards the transmit axis.
fn neumann_pair(rt: f64, rr: f64, kt: u32, kr: u32, d: f64, z: f64, theta: f64) -> Result<f64> {
    let (ct, st) = (theta.cos(), theta.sin());
    let base = rt * rt + rr * rr + d * d + z * z;
    let est = adaptive_quad_2d(
        |t, phi| {
            let (s_t, c_t) = t.sin_cos();
            let (s_p, c_p) = phi.sin_cos();
            let r2 = base + 2.0 * rr * c_p * (d * ct + z * st)
                + 2.0 * rt * rr * (s_p * c_t - c_p * s_t * ct)
                - 2.0 * d * rt * s_t;
            (s_t * c_p - c_t * s_p * ct) / r2.sqrt()
        },
        DOUBLE_TOL,
    )?;
    Ok(MU0 * kt as f64 * kr as f64 * rt * rr / (4.0 * PI) * est.value)
}

/// A filamentary circular loop in space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Loop {
    pub center: Vec3,
    /// Unit normal.
    pub normal: Vec3,
    pub radius: f64,
    pub turns: u32,
}

impl Loop {
    /// Orthonormal in-plane pair `(u, v)` with `u × v = normal`.
    pub fn basis(&self) -> (Vec3, Vec3) {
        let n = self.normal;
        let helper = if n[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
        let u = normalize(cross(helper, n));
        (u, cross(n, u))
    }

    fn point(&self, u: Vec3, v: Vec3, a: f64) -> (Vec3, Vec3) {
        let (s, c) = a.sin_cos();
        let r = self.radius;
        let p = [
            self.center[0] + r * (c * u[0] + s * v[0]),
            self.center[1] + r * (c * u[1] + s * v[1]),
            self.center[2] + r * (c * u[2] + s * v[2]),
        ];
        let dp = [
            r * (-s * u[0] + c * v[0]),
            r * (-s * u[1] + c * v[1]),
            r * (-s * u[2] + c * v[2]),
        ];
        (p, dp)
    }
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(a: Vec3) -> Vec3 {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Mutual inductance between a loop lying in the `z = 0` plane centred on
/// `(cx, cy, 0)` and an arbitrary loop, by integrating the first loop's
/// closed-form vector potential around the second.
pub fn mutual_axial_loop(cx: f64, cy: f64, radius: f64, turns: u32, other: &Loop) -> Result<f64> {
    let (u, v) = other.basis();
    let a = radius;
    let mut failure = None;
    let est = adaptive_quad_1d(
        |phi| {
            let (p, dp) = other.point(u, v, phi);
            let (x, y, z) = (p[0] - cx, p[1] - cy, p[2]);
            let rho = x.hypot(y);
            if rho == 0.0 {
                return 0.0;
            }
            let k = (4.0 * a * rho / ((a + rho).powi(2) + z * z)).sqrt();
            if k >= 1.0 - crate::elliptic::SINGULAR_MARGIN {
                failure.get_or_insert(Error::Intersecting(format!("loops touch at azimuth {phi}")));
                return f64::NAN;
            }
            let tangential = (-y * dp[0] + x * dp[1]) / rho;
            (a / rho).sqrt() * psi_standard(k) / k * tangential
        },
        0.0,
        2.0 * PI,
        QuadOptions { rel_tol: SINGLE_TOL, abs_tol: 0.0, max_evals: 400_000 },
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(MU0 * turns as f64 * other.turns as f64 / PI * est?.value)
}

/// Mutual inductance between transmit coil `n` and receive coil `m`.
pub fn mutual_tx_rx(geom: &LinkGeometry, m: usize, n: usize, method: InductanceMethod) -> Result<f64> {
    let pose = geom.receive_coil_pose(m)?;
    let d = geom.pair_distance(m, n)?;
    let z = pose.center[2];
    let (rt, rr) = (geom.coil_radius_tx, geom.coil_radius_rx);
    if z.abs() < 1e-15 && d <= rt + rr && !geom.is_tilted() {
        return Err(Error::Intersecting(format!(
            "coplanar receive coil {m} and transmit coil {n} overlap (centre distance {d} m)"
        )));
    }
    match method {
        InductanceMethod::Elliptic => {
            elliptic_pair(rt, rr, geom.turns_tx, geom.turns_rx, d, z, geom.deflection())
        }
        InductanceMethod::Neumann => {
            neumann_pair(rt, rr, geom.turns_tx, geom.turns_rx, d, z, geom.deflection())
        }
        InductanceMethod::VectorPotential => {
            let c = geom.tx_coil_center(n)?;
            let rx = Loop {
                center: pose.center,
                normal: geom.rx_normal(),
                radius: rr,
                turns: geom.turns_rx,
            };
            mutual_axial_loop(c[0], c[1], rt, geom.turns_tx, &rx)
        }
    }
}

/// Mutual inductance of two equal coplanar coils with centres `d` apart.
pub fn coplanar_mutual(radius: f64, turns: u32, d: f64, method: InductanceMethod) -> Result<f64> {
    if d <= 2.0 * radius {
        return Err(Error::Intersecting(format!(
            "coplanar coils of radius {radius} m overlap at centre distance {d} m"
        )));
    }
    match method {
        InductanceMethod::Elliptic => elliptic_pair(radius, radius, turns, turns, d, 0.0, 0.0),
        InductanceMethod::Neumann => neumann_pair(radius, radius, turns, turns, d, 0.0, 0.0),
        InductanceMethod::VectorPotential => {
            let other = Loop { center: [d, 0.0, 0.0], normal: [0.0, 0.0, 1.0], radius, turns };
            mutual_axial_loop(0.0, 0.0, radius, turns, &other)
        }
    }
}

/// Crosstalk between transmit coils `n1 ≠ n2`.
pub fn mutual_tx_tx(geom: &LinkGeometry, n1: usize, n2: usize, method: InductanceMethod) -> Result<f64> {
    let d = geom.tx_pair_distance(n1, n2)?;
    coplanar_mutual(geom.coil_radius_tx, geom.turns_tx, d, method)
}

/// Coupling between receive coils `m1 ≠ m2` (used only by the MIMO
/// correlation model).
pub fn mutual_rx_rx(geom: &LinkGeometry, m1: usize, m2: usize, method: InductanceMethod) -> Result<f64> {
    let d = geom.rx_pair_distance(m1, m2)?;
    coplanar_mutual(geom.coil_radius_rx, geom.turns_rx, d, method)
}

/// Coplanar ring coupling matrix: one value per cyclic shift, zero diagonal.
fn ring_matrix(count: usize, radius: f64, ring: f64, turns: u32, method: InductanceMethod) -> Result<DMatrix<f64>> {
    let shifts: Vec<f64> = (1..count)
        .into_par_iter()
        .map(|s| {
            let d = ring * (2.0 - 2.0 * (2.0 * PI * s as f64 / count as f64).cos()).sqrt();
            coplanar_mutual(radius, turns, d, method)
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(count, count, |i, j| {
        let s = (i as i64 - j as i64).rem_euclid(count as i64) as usize;
        if s == 0 {
            0.0
        } else {
            shifts[s - 1]
        }
    }))
}

/// Fills `M` and `Mᵗ` with the given method.
pub fn build_inductance_matrices_with(geom: &LinkGeometry, method: InductanceMethod) -> Result<MutualInductanceMatrix> {
    geom.validate()?;
    let (nr, nt) = (geom.n_rx, geom.n_tx);
    let entries: Vec<f64> = (0..nr * nt)
        .into_par_iter()
        .map(|idx| mutual_tx_rx(geom, idx / nt + 1, idx % nt + 1, method))
        .collect::<Result<_>>()?;
    let tx_rx = DMatrix::from_row_slice(nr, nt, &entries);
    let tx_tx = ring_matrix(nt, geom.coil_radius_tx, geom.ring_radius_tx, geom.turns_tx, method)?;
    Ok(MutualInductanceMatrix { tx_rx, tx_tx })
}

/// Fills `M` and `Mᵗ` with the elliptic method.
pub fn build_inductance_matrices(geom: &LinkGeometry) -> Result<MutualInductanceMatrix> {
    build_inductance_matrices_with(geom, InductanceMethod::Elliptic)
}

/// Receive-side analogue of `Mᵗ`.
pub fn rx_coupling_matrix(geom: &LinkGeometry, method: InductanceMethod) -> Result<DMatrix<f64>> {
    geom.validate()?;
    ring_matrix(geom.n_rx, geom.coil_radius_rx, geom.ring_radius_rx, geom.turns_rx, method)
}
