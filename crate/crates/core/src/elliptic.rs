//! Complete elliptic integrals and the Ψ kernel of the inclined-filament
//! mutual inductance formula.
//!
//! Two normalisations are supported. [`EllipticConvention::Standard`]
//! integrates over `[0, π/2]` (the usual `K`, `E`);
//! [`EllipticConvention::HalfTurn`] integrates over `[0, π]` and is exactly
//! twice the standard value. The free functions [`elliptic_k`],
//! [`elliptic_e`] and [`psi`] use the half-turn form. The mutual inductance
//! kernels use the standard form, which is the one that reproduces the
//! Neumann double integral.
//!
//! Arguments are the modulus `ξ` (not the parameter `m = ξ²`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Moduli closer than this to 1 are rejected for `K` and `Ψ`.
pub const SINGULAR_MARGIN: f64 = 1e-12;

/// Upper integration limit of the complete integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EllipticConvention {
    /// `∫₀^{π/2}`.
    Standard,
    /// `∫₀^{π}`, twice the standard value.
    HalfTurn,
}

impl EllipticConvention {
    pub fn domain_upper_limit(self) -> f64 {
        match self {
            EllipticConvention::Standard => PI / 2.0,
            EllipticConvention::HalfTurn => PI,
        }
    }

    fn scale(self) -> f64 {
        match self {
            EllipticConvention::Standard => 1.0,
            EllipticConvention::HalfTurn => 2.0,
        }
    }

    /// Complete integral of the first kind.
    pub fn k(self, xi: f64) -> Result<f64> {
        check_open(xi)?;
        Ok(self.scale() * agm(xi).0)
    }

    /// Complete integral of the second kind.
    pub fn e(self, xi: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::Domain(format!("elliptic modulus {xi} outside [0, 1]")));
        }
        if xi == 1.0 {
            return Ok(self.scale());
        }
        if 1.0 - xi < SINGULAR_MARGIN {
            // E is continuous at 1 with E(1) = 1; the AGM's K factor overflows first.
            let m1 = (1.0 - xi) * (1.0 + xi);
            return Ok(self.scale() * (1.0 + 0.5 * m1 * ((16.0 / m1).ln() * 0.5 - 0.5)));
        }
        Ok(self.scale() * agm(xi).1)
    }

    /// `Ψ(ξ) = (1 − ξ²/2)·K(ξ) − E(ξ)`.
    pub fn psi(self, xi: f64) -> Result<f64> {
        check_open(xi)?;
        Ok(self.scale() * psi_standard(xi))
    }
}

fn check_open(xi: f64) -> Result<()> {
    if !(xi >= 0.0 && xi < 1.0 - SINGULAR_MARGIN) {
        return Err(Error::Domain(format!(
            "elliptic modulus {xi} outside [0, 1) or within {SINGULAR_MARGIN:e} of the singularity"
        )));
    }
    Ok(())
}

/// Standard `(K, E)` by the arithmetic–geometric mean.
fn agm(xi: f64) -> (f64, f64) {
    let mut a = 1.0;
    let mut b = ((1.0 - xi) * (1.0 + xi)).sqrt();
    let mut c = xi;
    let mut pow2 = 0.5;
    let mut sum = pow2 * c * c;
    for _ in 0..40 {
        if c.abs() <= 1e-17 * a {
            break;
        }
        let an = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = an;
        pow2 *= 2.0;
        sum += pow2 * c * c;
    }
    let k = PI / (2.0 * a);
    (k, k * (1.0 - sum))
}

/// Standard-convention Ψ. The direct difference cancels catastrophically for
/// small moduli (Ψ ~ πξ⁴/32), so a positive-term series is used there.
pub(crate) fn psi_standard(xi: f64) -> f64 {
    let m = xi * xi;
    if m < 0.5 {
        psi_series(m)
    } else {
        psi_direct(xi)
    }
}

fn psi_direct(xi: f64) -> f64 {
    let (k, e) = agm(xi);
    (1.0 - 0.5 * xi * xi) * k - e
}

/// Ψ = (π/2) Σ_{n≥2} a_{n-1} (n-1)/(2n) m^n,  a_j = ((1/2)_j / j!)²
fn psi_series(m: f64) -> f64 {
    let mut a = 0.25;
    let mut mn = m * m;
    let mut sum = 0.0;
    for n in 2..400 {
        let term = a * (n as f64 - 1.0) / (2.0 * n as f64) * mn;
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
        let j = n as f64;
        a *= ((2.0 * j - 1.0) / (2.0 * j)).powi(2);
        mn *= m;
    }
    PI / 2.0 * sum
}

/// `∫₀^π dt / √(1 − ξ² sin² t)`.
pub fn elliptic_k(xi: f64) -> Result<f64> {
    EllipticConvention::HalfTurn.k(xi)
}

/// `∫₀^π √(1 − ξ² sin² t) dt`.
pub fn elliptic_e(xi: f64) -> Result<f64> {
    EllipticConvention::HalfTurn.e(xi)
}

/// `Ψ(ξ) = (1 − ξ²/2)·K(ξ) − E(ξ)` over `[0, π]`.
pub fn psi(xi: f64) -> Result<f64> {
    EllipticConvention::HalfTurn.psi(xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{adaptive_quad_1d, QuadOptions};

    fn quad(f: impl Fn(f64) -> f64) -> f64 {
        adaptive_quad_1d(f, 0.0, PI, QuadOptions::relative(1e-15)).unwrap().value
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(elliptic_k(0.0).unwrap(), PI);
        assert_eq!(elliptic_e(0.0).unwrap(), PI);
        assert_eq!(psi(0.0).unwrap(), 0.0);
        assert_eq!(elliptic_e(1.0).unwrap(), 2.0);
    }

    #[test]
    fn agrees_with_quadrature() {
        for &xi in &[0.1, 0.5, 0.7, 0.9, 0.99, 0.999] {
            let k = quad(|t| 1.0 / (1.0 - xi * xi * t.sin().powi(2)).sqrt());
            let e = quad(|t| (1.0 - xi * xi * t.sin().powi(2)).sqrt());
            assert!(rel(elliptic_k(xi).unwrap(), k) < 1e-12, "K({xi})");
            assert!(rel(elliptic_e(xi).unwrap(), e) < 1e-12, "E({xi})");
        }
    }

    #[test]
    fn psi_against_combined_quadrature() {
        // Ψ = ∫₀^π [ξ² sin²t − ξ²/2] / √(1 − ξ² sin²t) dt, no cancellation between K and E.
        for &xi in &[0.9, 0.6, 0.3] {
            let q = quad(|t| {
                let s2 = t.sin().powi(2);
                xi * xi * (s2 - 0.5) / (1.0 - xi * xi * s2).sqrt()
            });
            assert!(rel(psi(xi).unwrap(), q) < 1e-12, "Ψ({xi})");
        }
    }

    #[test]
    fn psi_small_modulus_is_quartic() {
        // Half-turn convention: Ψ(ξ) = (π/16) ξ⁴ (1 + (3/4) ξ² + …)
        let xi = 1e-3f64;
        let lead = PI / 16.0 * xi.powi(4);
        assert!(rel(psi(xi).unwrap(), lead) < 1e-5);
        let xi = 0.05f64;
        let two_terms = PI / 16.0 * xi.powi(4) * (1.0 + 0.75 * xi * xi);
        assert!(rel(psi(xi).unwrap(), two_terms) < 1e-5);
    }

    #[test]
    fn series_and_agm_branches_meet() {
        for m in [0.3, 0.45, 0.5] {
            assert!(rel(psi_series(m), psi_direct(f64::sqrt(m))) < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn legendre_relation() {
        for &xi in &[0.1f64, 0.4, 0.7, 0.95] {
            let xc = (1.0 - xi * xi).sqrt();
            let (k, e) = (elliptic_k(xi).unwrap() / 2.0, elliptic_e(xi).unwrap() / 2.0);
            let (kc, ec) = (elliptic_k(xc).unwrap() / 2.0, elliptic_e(xc).unwrap() / 2.0);
            assert!((k * ec + e * kc - k * kc - PI / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn half_turn_is_twice_standard() {
        for &xi in &[0.2, 0.5, 0.8] {
            let s = EllipticConvention::Standard;
            assert_eq!(elliptic_k(xi).unwrap(), 2.0 * s.k(xi).unwrap());
            assert_eq!(elliptic_e(xi).unwrap(), 2.0 * s.e(xi).unwrap());
        }
    }

    #[test]
    fn monotone() {
        assert!(elliptic_k(0.999).unwrap() > elliptic_k(0.99).unwrap());
        assert!(elliptic_k(0.999).unwrap().is_finite());
        let mut prev_k = 0.0;
        let mut prev_e = f64::INFINITY;
        let mut prev_p = -1.0;
        for i in 0..200 {
            let xi = i as f64 / 200.0;
            let (k, e, p) = (elliptic_k(xi).unwrap(), elliptic_e(xi).unwrap(), psi(xi).unwrap());
            assert!(k > prev_k || i == 0);
            assert!(e < prev_e);
            assert!(p > prev_p);
            prev_k = k;
            prev_e = e;
            prev_p = p;
        }
    }

    #[test]
    fn domain_errors() {
        assert!(elliptic_k(1.0).is_err());
        assert!(elliptic_k(-0.1).is_err());
        assert!(elliptic_k(1.0 - 1e-13).is_err());
        assert!(elliptic_e(1.1).is_err());
        assert!(psi(1.0).is_err());
    }
}
