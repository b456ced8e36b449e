use std::f64::consts::PI;

use num_complex::Complex64;

use super::{CapacityReport, Scheme};
use crate::elliptic::{psi_standard, SINGULAR_MARGIN};
use crate::error::{Error, Result};
use crate::geometry::LinkGeometry;
use crate::inductance::{CoilElectrical, MU0};
use crate::quadrature::{adaptive_quad_1d, QuadOptions};
use crate::txrx::LinkBudget;

/// Mutual inductance of two parallel coaxially-oriented coils whose axes are
/// `d` apart horizontally and `height` apart vertically.
pub fn aligned_pair_inductance(rt: f64, rr: f64, kt: u32, kr: u32, d: f64, height: f64) -> Result<f64> {
    if !(rt > 0.0 && rr > 0.0 && d >= 0.0 && height >= 0.0) {
        return Err(Error::Domain(format!("invalid pair rt={rt} rr={rr} d={d} D={height}")));
    }
    if height == 0.0 && d <= rt + rr {
        return Err(Error::Intersecting(format!("coplanar coils overlap at distance {d} m")));
    }
    let q = d / rr;
    let mut bad = None;
    let est = adaptive_quad_1d(
        |phi| {
            let c = phi.cos();
            let v = (1.0 + q * q - 2.0 * q * c).max(0.0).sqrt();
            let weight = 1.0 - q * c;
            if v == 0.0 {
                return weight * PI / 4.0 * (rt * rr / (rt * rt + height * height)).powf(1.5);
            }
            let k2 = 4.0 * rt * rr * v / ((rt + rr * v).powi(2) + height * height);
            let k = k2.sqrt();
            if k >= 1.0 - SINGULAR_MARGIN {
                bad.get_or_insert(Error::Intersecting(format!("modulus {k} reaches 1")));
                return f64::NAN;
            }
            weight * psi_standard(k) / (k * v.powf(1.5))
        },
        0.0,
        PI,
        QuadOptions { rel_tol: 1e-12, abs_tol: 0.0, max_evals: 200_000 },
    );
    if let Some(e) = bad {
        return Err(e);
    }
    Ok(2.0 * MU0 * kt as f64 * kr as f64 * (rt * rr).sqrt() / PI * est?.value)
}

fn require_aligned(geom: &LinkGeometry) -> Result<usize> {
    geom.validate()?;
    if !geom.is_aligned() {
        return Err(Error::Geometry("closed-form capacity needs an aligned geometry".into()));
    }
    geom.fold().ok_or(Error::NotAMultiple { n_rx: geom.n_rx, n_tx: geom.n_tx })
}

fn link_gain(elec: &CoilElectrical, budget: &LinkBudget) -> f64 {
    budget.total_tx_power / budget.noise_power * elec.omega().powi(2) / elec.impedance.norm_sqr()
}

/// Aligned, crosstalk-free capacity evaluated mode by mode from the coil
/// distances, without assembling a channel matrix.
pub fn capacity_oam_simplified(geom: &LinkGeometry, elec: &CoilElectrical, budget: &LinkBudget) -> Result<CapacityReport> {
    let fold = require_aligned(geom)?;
    budget.validate()?;
    let (nt, nr) = (geom.n_tx, geom.n_rx);
    let m: Vec<f64> = (1..=nr)
        .map(|i| {
            let d = geom.pair_distance(i, 1)?;
            aligned_pair_inductance(
                geom.coil_radius_tx,
                geom.coil_radius_rx,
                geom.turns_tx,
                geom.turns_rx,
                d,
                geom.axial_distance,
            )
        })
        .collect::<Result<_>>()?;
    let g = link_gain(elec, budget) * fold as f64 / nt as f64;
    let sinr = (0..nt)
        .map(|l| {
            let s: Complex64 = m
                .iter()
                .enumerate()
                .map(|(i, &mi)| {
                    let block = (i / fold) * l % nt;
                    Complex64::from_polar(mi, -2.0 * PI * block as f64 / nt as f64)
                })
                .sum();
            g * (s / fold as f64).norm_sqr()
        })
        .collect();
    let mut report = CapacityReport::from_sinr(sinr, Scheme::OamBlind);
    report.bounds = Some(capacity_bounds(geom, elec, budget)?);
    Ok(report)
}

/// `(lower, upper)` from the farthest and nearest possible coil pairs,
/// `N_t·log2(1 + (P_t·I²/N_0)·(ω/|Z|)²·M(d)²)` with `d = R_r + R_t` and
/// `d = |R_r − R_t|`.
pub fn capacity_bounds(geom: &LinkGeometry, elec: &CoilElectrical, budget: &LinkBudget) -> Result<(f64, f64)> {
    let fold = require_aligned(geom)?;
    budget.validate()?;
    let g = link_gain(elec, budget) * (fold * fold) as f64;
    let bound = |d: f64| -> Result<f64> {
        let m = aligned_pair_inductance(
            geom.coil_radius_tx,
            geom.coil_radius_rx,
            geom.turns_tx,
            geom.turns_rx,
            d,
            geom.axial_distance,
        )?;
        Ok(geom.n_tx as f64 * (g * m * m).ln_1p() / std::f64::consts::LN_2)
    };
    let lower = bound(geom.ring_radius_rx + geom.ring_radius_tx)?;
    let upper = bound((geom.ring_radius_rx - geom.ring_radius_tx).abs())?;
    Ok((lower, upper))
}
