//! Coil-ring layout and transceiver pose.
//!
//! Transmit coils sit on a ring of radius `ring_radius_tx` in the `z = 0`
//! plane, centred on the origin, with coil `n` at azimuth `2πn/N_t` (so coil
//! `N_t` lies on the positive x-axis). The receive ring is centred at
//! `(offset_x, offset_y, axial_distance)` and its normal is tilted towards
//! `(tan θx, tan θy, 1)`. All coil normals on a ring are parallel to the ring
//! normal.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Plain 3-vector in metres.
pub type Vec3 = [f64; 3];

/// Layout of both coil rings plus the misalignment pose, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    pub n_tx: usize,
    pub n_rx: usize,
    pub ring_radius_tx: f64,
    pub ring_radius_rx: f64,
    pub coil_radius_tx: f64,
    pub coil_radius_rx: f64,
    pub turns_tx: u32,
    pub turns_rx: u32,
    pub axial_distance: f64,
    pub offset_x: f64,
    pub offset_y: f64,
    pub tilt_x: f64,
    pub tilt_y: f64,
}

/// Centre of one coil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoilPose {
    pub center: Vec3,
    /// 1-based coil number.
    pub index: usize,
}

impl LinkGeometry {
    /// Eight-coil rings of 25 mm radius, 5 mm single-turn coils, 25 mm apart,
    /// perfectly aligned.
    pub fn baseline() -> Self {
        LinkGeometry {
            n_tx: 8,
            n_rx: 8,
            ring_radius_tx: 25e-3,
            ring_radius_rx: 25e-3,
            coil_radius_tx: 5e-3,
            coil_radius_rx: 5e-3,
            turns_tx: 1,
            turns_rx: 1,
            axial_distance: 25e-3,
            offset_x: 0.0,
            offset_y: 0.0,
            tilt_x: 0.0,
            tilt_y: 0.0,
        }
    }

    /// Validates the invariants and returns the geometry unchanged.
    pub fn checked(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let g = self;
        if g.n_tx == 0 || g.n_rx == 0 {
            return Err(Error::Geometry("coil counts must be at least 1".into()));
        }
        if g.turns_tx == 0 || g.turns_rx == 0 {
            return Err(Error::Geometry("turn counts must be at least 1".into()));
        }
        let lengths = [
            ("ring_radius_tx", g.ring_radius_tx),
            ("ring_radius_rx", g.ring_radius_rx),
            ("coil_radius_tx", g.coil_radius_tx),
            ("coil_radius_rx", g.coil_radius_rx),
        ];
        for (name, v) in lengths {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Geometry(format!("{name} must be positive, got {v}")));
            }
        }
        if !(g.axial_distance.is_finite() && g.axial_distance >= 0.0) {
            return Err(Error::Geometry(format!(
                "axial_distance must be non-negative, got {}",
                g.axial_distance
            )));
        }
        if !g.offset_x.is_finite() || !g.offset_y.is_finite() {
            return Err(Error::Geometry("offsets must be finite".into()));
        }
        for (name, v) in [("tilt_x", g.tilt_x), ("tilt_y", g.tilt_y)] {
            if !(v.is_finite() && v.abs() < PI / 2.0) {
                return Err(Error::Geometry(format!("{name} must lie in (-pi/2, pi/2), got {v}")));
            }
        }
        check_ring("transmit", g.n_tx, g.ring_radius_tx, g.coil_radius_tx)?;
        check_ring("receive", g.n_rx, g.ring_radius_rx, g.coil_radius_rx)?;
        Ok(())
    }

    /// Deflection between the two ring normals, `arctan √(tan²θx + tan²θy)`.
    pub fn deflection(&self) -> f64 {
        self.tilt_x.tan().hypot(self.tilt_y.tan()).atan()
    }

    pub fn is_tilted(&self) -> bool {
        self.tilt_x != 0.0 || self.tilt_y != 0.0
    }

    /// No tilt and no lateral offset.
    pub fn is_aligned(&self) -> bool {
        !self.is_tilted() && self.offset_x == 0.0 && self.offset_y == 0.0
    }

    /// Number of receive coils per transmit coil, when `N_r` is a multiple of `N_t`.
    pub fn fold(&self) -> Option<usize> {
        (self.n_rx % self.n_tx == 0).then(|| self.n_rx / self.n_tx)
    }

    /// Unit normal shared by every receive coil.
    pub fn rx_normal(&self) -> Vec3 {
        match self.tilt_basis() {
            None => [0.0, 0.0, 1.0],
            Some(b) => b.normal,
        }
    }

    fn tilt_basis(&self) -> Option<TiltBasis> {
        let ax = self.tilt_x.tan();
        let ay = self.tilt_y.tan();
        let t = ax.hypot(ay);
        if t == 0.0 {
            return None;
        }
        let (cb, sb) = (ax / t, ay / t);
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = t * c;
        Some(TiltBasis {
            ex: [c * cb * cb + sb * sb, (c - 1.0) * cb * sb, -s * cb],
            ey: [(c - 1.0) * cb * sb, c * sb * sb + cb * cb, -s * sb],
            normal: [s * cb, s * sb, c],
        })
    }

    /// Centre of transmit coil `n` (1-based).
    pub fn tx_coil_center(&self, n: usize) -> Result<Vec3> {
        check_index("transmit coil", n, self.n_tx)?;
        let a = 2.0 * PI * n as f64 / self.n_tx as f64;
        Ok([self.ring_radius_tx * a.cos(), self.ring_radius_tx * a.sin(), 0.0])
    }

    /// Pose of receive coil `m` (1-based).
    pub fn receive_coil_pose(&self, m: usize) -> Result<CoilPose> {
        check_index("receive coil", m, self.n_rx)?;
        let a = 2.0 * PI * m as f64 / self.n_rx as f64;
        let (ca, sa) = (a.cos(), a.sin());
        let r = self.ring_radius_rx;
        let center = match self.tilt_basis() {
            None => [self.offset_x + r * ca, self.offset_y + r * sa, self.axial_distance],
            Some(b) => [
                self.offset_x + r * (ca * b.ex[0] + sa * b.ey[0]),
                self.offset_y + r * (ca * b.ex[1] + sa * b.ey[1]),
                self.axial_distance + r * (ca * b.ex[2] + sa * b.ey[2]),
            ],
        };
        Ok(CoilPose { center, index: m })
    }

    /// Distance from the centre of receive coil `m` to the axis of transmit coil `n`.
    pub fn pair_distance(&self, m: usize, n: usize) -> Result<f64> {
        let p = self.receive_coil_pose(m)?.center;
        let c = self.tx_coil_center(n)?;
        Ok((p[0] - c[0]).hypot(p[1] - c[1]))
    }

    /// Centre-to-centre distance between two distinct transmit coils.
    pub fn tx_pair_distance(&self, n1: usize, n2: usize) -> Result<f64> {
        check_index("transmit coil", n1, self.n_tx)?;
        check_index("transmit coil", n2, self.n_tx)?;
        ring_chord(self.ring_radius_tx, self.n_tx, n1, n2)
    }

    /// Centre-to-centre distance between two distinct receive coils.
    pub fn rx_pair_distance(&self, m1: usize, m2: usize) -> Result<f64> {
        check_index("receive coil", m1, self.n_rx)?;
        check_index("receive coil", m2, self.n_rx)?;
        ring_chord(self.ring_radius_rx, self.n_rx, m1, m2)
    }
}

struct TiltBasis {
    ex: Vec3,
    ey: Vec3,
    normal: Vec3,
}

fn ring_chord(radius: f64, count: usize, a: usize, b: usize) -> Result<f64> {
    if a == b {
        return Err(Error::Domain(format!(
            "coil {a} paired with itself has no crosstalk geometry"
        )));
    }
    let shift = (a as i64 - b as i64).rem_euclid(count as i64) as f64;
    Ok(radius * (2.0 - 2.0 * (2.0 * PI * shift / count as f64).cos()).sqrt())
}

fn check_ring(side: &str, count: usize, ring: f64, coil: f64) -> Result<()> {
    if count > 1 {
        let limit = ring * (PI / count as f64).sin();
        if coil >= limit {
            return Err(Error::Geometry(format!(
                "{side} coils overlap: coil radius {coil} m must be below {limit} m for {count} coils on a {ring} m ring"
            )));
        }
    }
    Ok(())
}

pub(crate) fn check_index(what: &'static str, index: usize, max: usize) -> Result<()> {
    if index == 0 || index > max {
        return Err(Error::IndexOutOfRange { what, index, max });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Rodrigues rotation of `v` about unit axis `k` by `angle`.
    fn rotate(v: Vec3, k: Vec3, angle: f64) -> Vec3 {
        let (c, s) = (angle.cos(), angle.sin());
        let dot = k[0] * v[0] + k[1] * v[1] + k[2] * v[2];
        let cross = [
            k[1] * v[2] - k[2] * v[1],
            k[2] * v[0] - k[0] * v[2],
            k[0] * v[1] - k[1] * v[0],
        ];
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = v[i] * c + cross[i] * s + k[i] * dot * (1.0 - c);
        }
        out
    }

    fn rotation_oracle(g: &LinkGeometry, m: usize) -> Vec3 {
        let a = 2.0 * PI * m as f64 / g.n_rx as f64;
        let local = [g.ring_radius_rx * a.cos(), g.ring_radius_rx * a.sin(), 0.0];
        let (ax, ay) = (g.tilt_x.tan(), g.tilt_y.tan());
        let t = ax.hypot(ay);
        let axis = [-ay / t, ax / t, 0.0];
        let r = rotate(local, axis, t.atan());
        [r[0] + g.offset_x, r[1] + g.offset_y, r[2] + g.axial_distance]
    }

    #[test]
    fn aligned_last_coil_on_x_axis() {
        let g = LinkGeometry::baseline();
        let p = g.receive_coil_pose(8).unwrap().center;
        assert_abs_diff_eq!(p[0], 25e-3, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[2], 25e-3, epsilon = 1e-15);
    }

    #[test]
    fn offset_translates() {
        let g = LinkGeometry { offset_x: 10e-3, ..LinkGeometry::baseline() };
        let p = g.receive_coil_pose(8).unwrap().center;
        assert_abs_diff_eq!(p[0], 35e-3, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn tilted_pose_matches_rotation_oracle() {
        let cases = [(10f64, 0f64), (0.0, 15.0), (-20.0, 7.0), (35.0, -25.0)];
        for (tx, ty) in cases {
            let g = LinkGeometry {
                tilt_x: tx.to_radians(),
                tilt_y: ty.to_radians(),
                offset_x: 3e-3,
                offset_y: -2e-3,
                ..LinkGeometry::baseline()
            };
            for m in 1..=8 {
                let p = g.receive_coil_pose(m).unwrap().center;
                let q = rotation_oracle(&g, m);
                for i in 0..3 {
                    assert!((p[i] - q[i]).abs() < 1e-12, "tilt ({tx},{ty}) m={m}");
                }
            }
        }
    }

    #[test]
    fn tilted_pose_continuous_at_alignment() {
        let base = LinkGeometry::baseline();
        let tiny = LinkGeometry { tilt_x: 1e-9, ..base };
        for m in 1..=8 {
            let a = base.receive_coil_pose(m).unwrap().center;
            let b = tiny.receive_coil_pose(m).unwrap().center;
            for i in 0..3 {
                assert!((a[i] - b[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn normal_follows_tilt_tangents() {
        let g = LinkGeometry { tilt_x: 0.3, tilt_y: -0.2, ..LinkGeometry::baseline() };
        let n = g.rx_normal();
        let scale = n[2];
        assert_abs_diff_eq!(n[0] / scale, 0.3f64.tan(), epsilon = 1e-12);
        assert_abs_diff_eq!(n[1] / scale, (-0.2f64).tan(), epsilon = 1e-12);
        assert_abs_diff_eq!(scale.acos(), g.deflection(), epsilon = 1e-12);
    }

    #[test]
    fn pair_distance_aligned_cases() {
        let g = LinkGeometry::baseline();
        assert_abs_diff_eq!(g.pair_distance(1, 1).unwrap(), 0.0, epsilon = 1e-15);
        let chord = 25e-3 * (2.0 - 2.0 * (PI / 4.0).cos()).sqrt();
        assert_abs_diff_eq!(g.pair_distance(1, 2).unwrap(), chord, epsilon = 1e-15);
    }

    #[test]
    fn pair_distance_matches_point_to_line() {
        let g = LinkGeometry {
            tilt_x: 12f64.to_radians(),
            tilt_y: 4f64.to_radians(),
            offset_x: 6e-3,
            ..LinkGeometry::baseline()
        };
        for m in 1..=8 {
            for n in 1..=8 {
                let p = g.receive_coil_pose(m).unwrap().center;
                let c = g.tx_coil_center(n).unwrap();
                // |(p - c) x z| for unit axis z
                let d = [p[0] - c[0], p[1] - c[1], p[2] - c[2]];
                let cross = [d[1], -d[0], 0.0];
                let expect = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
                assert!((g.pair_distance(m, n).unwrap() - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tx_chords() {
        let g = LinkGeometry::baseline();
        assert_abs_diff_eq!(g.tx_pair_distance(1, 5).unwrap(), 50e-3, epsilon = 1e-15);
        assert_eq!(g.tx_pair_distance(1, 2).unwrap(), g.tx_pair_distance(2, 3).unwrap());
        let tri = LinkGeometry {
            n_tx: 3,
            ring_radius_tx: 10e-3,
            coil_radius_tx: 1e-3,
            ..LinkGeometry::baseline()
        };
        assert_abs_diff_eq!(tri.tx_pair_distance(1, 2).unwrap(), 10e-3 * 3f64.sqrt(), epsilon = 1e-15);
        assert!(matches!(g.tx_pair_distance(3, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn index_errors() {
        let g = LinkGeometry::baseline();
        assert!(matches!(g.receive_coil_pose(0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(g.receive_coil_pose(9), Err(Error::IndexOutOfRange { .. })));
        assert!(g.pair_distance(1, 9).is_err());
    }

    #[test]
    fn overlap_rejected() {
        let g = LinkGeometry { coil_radius_tx: 10e-3, ..LinkGeometry::baseline() };
        assert!(matches!(g.validate(), Err(Error::Geometry(_))));
        let siso = LinkGeometry { n_tx: 1, n_rx: 1, coil_radius_tx: 40e-3, ..LinkGeometry::baseline() };
        assert!(siso.validate().is_ok());
    }

    #[test]
    fn circulant_index_shift() {
        let g = LinkGeometry { n_rx: 16, ..LinkGeometry::baseline() };
        for m in 1..=16 {
            for n in 1..=8 {
                let m2 = (m + 2 - 1) % 16 + 1;
                let n2 = n % 8 + 1;
                let a = g.pair_distance(m, n).unwrap();
                let b = g.pair_distance(m2, n2).unwrap();
                assert!((a - b).abs() < 1e-14);
            }
        }
    }
}
