use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{capacity_ls, CapacityReport, Scheme};
use crate::channel::ChannelMatrix;
use crate::config::{GeometrySection, SimulationConfig};
use crate::error::{Error, Result};
use crate::geometry::LinkGeometry;
use crate::harness::{run_sweep, Axis, Metric, SweepResult, SweepSpec};
use crate::inductance::{build_inductance_matrices_with, loop_self_inductance, rx_coupling_matrix, InductanceMethod};
use crate::linalg::{gram_eigenvalues, to_complex, CMat};
use crate::txrx::LinkBudget;

const CORR_TOL: f64 = 1e-9;

/// Square, Hermitian, unit diagonal and positive semidefinite.
pub fn validate_correlation(g: &CMat, n: usize, side: &str) -> Result<()> {
    if g.shape() != (n, n) {
        return Err(Error::Correlation(format!("{side} correlation is {:?}, expected {n}x{n}", g.shape())));
    }
    for i in 0..n {
        if (g[(i, i)] - Complex64::new(1.0, 0.0)).norm() > CORR_TOL {
            return Err(Error::Correlation(format!("{side} correlation diagonal entry {} is {}", i + 1, g[(i, i)])));
        }
        for j in 0..i {
            if (g[(i, j)] - g[(j, i)].conj()).norm() > CORR_TOL {
                return Err(Error::Correlation(format!("{side} correlation is not Hermitian at ({}, {})", i + 1, j + 1)));
            }
        }
    }
    let eig = SymmetricEigen::new(g.clone()).eigenvalues;
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -CORR_TOL * n as f64 {
        return Err(Error::Correlation(format!("{side} correlation has negative eigenvalue {min}")));
    }
    Ok(())
}

pub fn identity_correlation(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Nearest PSD matrix by eigenvalue clipping, rescaled to unit diagonal.
fn project_unit_psd(a: DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(a);
    let clipped = eig.eigenvalues.map(|v| v.max(0.0));
    let p = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    let d: Vec<f64> = (0..p.nrows()).map(|i| p[(i, i)].max(f64::MIN_POSITIVE).sqrt()).collect();
    DMatrix::from_fn(p.nrows(), p.ncols(), |i, j| if i == j { 1.0 } else { p[(i, j)] / (d[i] * d[j]) })
}

/// `(G_t, G_r)` built from `I + |coupling|/L` on each ring.
pub fn default_correlation(geom: &LinkGeometry, method: InductanceMethod) -> Result<(CMat, CMat)> {
    let mt = build_inductance_matrices_with(&LinkGeometry { n_rx: 1, ..*geom }, method)?.tx_tx;
    let mr = rx_coupling_matrix(geom, method)?;
    let lt = loop_self_inductance(geom.coil_radius_tx, geom.turns_tx);
    let lr = loop_self_inductance(geom.coil_radius_rx, geom.turns_rx);
    let side = |m: DMatrix<f64>, l: f64| {
        let n = m.nrows();
        to_complex(&project_unit_psd(DMatrix::identity(n, n) + m.abs() / l))
    };
    Ok((side(mt, lt), side(mr, lr)))
}

/// Powers `p_i = max(0, μ − N_0/g_i)` with `Σ p_i = total`, in the order of `gains`.
pub fn water_fill(gains: &[f64], total: f64, n0: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..gains.len()).filter(|&i| gains[i] > 0.0).collect();
    order.sort_by(|&a, &b| gains[b].total_cmp(&gains[a]));
    let mut powers = vec![0.0; gains.len()];
    if total <= 0.0 || order.is_empty() {
        return powers;
    }
    let mut active = order.len();
    let mut mu;
    loop {
        let inv: f64 = order[..active].iter().map(|&i| n0 / gains[i]).sum();
        mu = (total + inv) / active as f64;
        if mu > n0 / gains[order[active - 1]] || active == 1 {
            break;
        }
        active -= 1;
    }
    for &i in &order[..active] {
        powers[i] = (mu - n0 / gains[i]).max(0.0);
    }
    powers
}

/// `H_MIMO = G_r·H·G_t`, with equal power `P_t/N_t` per antenna or
/// water-filling over its singular values.
pub fn capacity_mimo(
    ch: &ChannelMatrix,
    budget: &LinkBudget,
    corr_tx: &CMat,
    corr_rx: &CMat,
    waterfill: bool,
) -> Result<CapacityReport> {
    budget.validate()?;
    validate_correlation(corr_tx, ch.n_tx(), "transmit")?;
    validate_correlation(corr_rx, ch.n_rx(), "receive")?;
    let h = corr_rx * &ch.h * corr_tx;
    let gains = gram_eigenvalues(&h);
    let (sinr, scheme) = if waterfill {
        let p = water_fill(&gains, budget.total_tx_power, budget.noise_power);
        (gains.iter().zip(&p).map(|(g, p)| g * p / budget.noise_power).collect(), Scheme::MimoWf)
    } else {
        let rho = budget.total_tx_power / (budget.noise_power * ch.n_tx() as f64);
        (gains.iter().map(|g| rho * g).collect(), Scheme::Mimo)
    };
    Ok(CapacityReport::from_sinr(sinr, scheme))
}

/// `C_LS(Hᵉ = H) − C_MIMO` with the default correlation and equal power.
pub fn capacity_gap(ch: &ChannelMatrix, geom: &LinkGeometry, budget: &LinkBudget) -> Result<f64> {
    let (gt, gr) = default_correlation(geom, InductanceMethod::Elliptic)?;
    let ls = capacity_ls(ch, &ch.h, budget)?;
    let mimo = capacity_mimo(ch, budget, &gt, &gr, false)?;
    Ok(ls.total_bits - mimo.total_bits)
}

/// [`capacity_gap`] over every `(N_t, N_r)` in `1..=n_grid` with the other
/// parameters of `template`; infeasible layouts are recorded as skipped rows.
pub fn capacity_gap_surface(template: &LinkGeometry, budget: &LinkBudget, n_grid: usize) -> Result<SweepResult> {
    budget.validate()?;
    if n_grid == 0 {
        return Err(Error::Sweep("grid size must be at least 1".into()));
    }
    let mut base = SimulationConfig { geometry: GeometrySection::from_geometry(template), ..SimulationConfig::default() };
    base.budget.tx_power_w = budget.total_tx_power;
    base.budget.noise_power_w = budget.noise_power;
    let n = n_grid as f64;
    run_sweep(&SweepSpec {
        name: "capacity_gap".into(),
        base,
        axes: vec![Axis::new("N_t", 1.0, n, 1.0), Axis::new("N_r", 1.0, n, 1.0)],
        metrics: vec![Metric::CapacityGap],
        trials: 1,
        seed: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelSource;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_correlation_is_plain_mimo() {
        let h = CMat::from_fn(3, 2, |i, j| Complex64::new(1.0 + i as f64, j as f64 - 0.5));
        let ch = ChannelMatrix::from_matrix(h.clone(), 1e6, ChannelSource::Imported).unwrap();
        let b = LinkBudget::new(2.0, 0.1).unwrap();
        let r = capacity_mimo(&ch, &b, &identity_correlation(2), &identity_correlation(3), false).unwrap();
        let gram = CMat::identity(2, 2) + h.adjoint() * &h * c(2.0 / (0.1 * 2.0));
        let det = gram.determinant();
        assert!((r.total_bits - det.re.log2()).abs() < 1e-10);
    }

    #[test]
    fn fully_correlated_collapses_to_one_stream() {
        let h = CMat::from_row_slice(2, 2, &[c(1.0), c(0.2), c(-0.3), c(0.9)]);
        let ch = ChannelMatrix::from_matrix(h, 1e6, ChannelSource::Imported).unwrap();
        let ones = CMat::from_element(2, 2, c(1.0));
        let b = LinkBudget::new(10.0, 0.01).unwrap();
        let r = capacity_mimo(&ch, &b, &ones, &identity_correlation(2), false).unwrap();
        assert!(r.per_mode_sinr.iter().filter(|&&s| s > 1e-9).count() == 1);
    }

    #[test]
    fn water_filling_never_loses() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let n = rng.random_range(1..6);
            let h = CMat::from_fn(n, n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            let ch = ChannelMatrix::from_matrix(h, 1e6, ChannelSource::Imported).unwrap();
            let b = LinkBudget::new(rng.random_range(0.01..10.0), rng.random_range(0.01..1.0)).unwrap();
            let id = identity_correlation(n);
            let eq = capacity_mimo(&ch, &b, &id, &id, false).unwrap().total_bits;
            let wf = capacity_mimo(&ch, &b, &id, &id, true).unwrap().total_bits;
            assert!(wf >= eq - 1e-10, "{wf} < {eq}");
        }
    }

    #[test]
    fn water_fill_spends_budget() {
        let p = water_fill(&[4.0, 1.0, 0.01], 1.0, 0.5);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(p[2], 0.0);
        assert!(p[0] > p[1]);
    }

    #[test]
    fn invalid_correlation_rejected() {
        let ch = ChannelMatrix::from_matrix(CMat::identity(2, 2), 1e6, ChannelSource::Imported).unwrap();
        let b = LinkBudget::default();
        let bad = CMat::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(1.0)]);
        assert!(matches!(capacity_mimo(&ch, &b, &bad, &identity_correlation(2), false), Err(Error::Correlation(_))));
        let off = CMat::from_row_slice(2, 2, &[c(2.0), c(0.0), c(0.0), c(1.0)]);
        assert!(capacity_mimo(&ch, &b, &identity_correlation(2), &off, false).is_err());
    }

    #[test]
    fn default_correlation_is_valid() {
        let g = LinkGeometry::baseline();
        let (gt, gr) = default_correlation(&g, InductanceMethod::Elliptic).unwrap();
        validate_correlation(&gt, 8, "t").unwrap();
        validate_correlation(&gr, 8, "r").unwrap();
        assert!(gt[(0, 1)].re > 0.0);
    }

    #[test]
    fn gap_surface_has_zero_on_siso_corner() {
        let g = LinkGeometry { ring_radius_tx: 50e-3, ring_radius_rx: 50e-3, ..LinkGeometry::baseline() };
        let r = capacity_gap_surface(&g, &LinkBudget::default(), 3).unwrap();
        assert_eq!(r.rows.len(), 9);
        let gap = r.column("capacity_gap").unwrap();
        assert!(gap[0].unwrap().abs() < 1e-12);
    }
}
