//! Closed-form capacity and BER of the OAM link, with and without channel
//! estimation, plus SISO and MIMO reference links.

mod mimo;
mod simplified;

pub use mimo::{
    capacity_gap, capacity_gap_surface, capacity_mimo, default_correlation, identity_correlation,
    validate_correlation, water_fill,
};
pub use simplified::{aligned_pair_inductance, capacity_bounds, capacity_oam_simplified};

use serde::{Deserialize, Serialize};

use crate::channel::{reduce_matrix, ChannelMatrix};
use crate::error::{Error, Result};
use crate::geometry::LinkGeometry;
use crate::inductance::{mutual_tx_rx, CoilElectrical, InductanceMethod};
use crate::linalg::{pinv, CMat};
use crate::txrx::{DftOperator, LinkBudget};

/// Mode-domain view `H_OAM = Wᴴ·Ĥ·W`.
#[derive(Debug, Clone)]
pub struct OamSpectrum {
    pub matrix: CMat,
    pub diagonal: Vec<num_complex::Complex64>,
    /// `Σ_{q≠l} |H_OAM[q, l]|²` for each mode `l`.
    pub offdiag_power_per_mode: Vec<f64>,
    pub fold: usize,
}

impl OamSpectrum {
    pub fn from_channel(ch: &ChannelMatrix) -> Result<Self> {
        let (h_hat, fold) = reduce_matrix(&ch.h)?;
        let w = DftOperator::new(ch.n_tx())?;
        let matrix = w.to_mode_domain(&h_hat)?;
        let n = matrix.nrows();
        let diagonal = (0..n).map(|l| matrix[(l, l)]).collect();
        let offdiag_power_per_mode = (0..n)
            .map(|l| (0..n).filter(|&q| q != l).map(|q| matrix[(q, l)].norm_sqr()).sum())
            .collect();
        Ok(OamSpectrum { matrix, diagonal, offdiag_power_per_mode, fold })
    }

    pub fn n_modes(&self) -> usize {
        self.diagonal.len()
    }

    /// `|h_l|² / (N_0·N_t/(P_t·I) + Σ_{q≠l}|H_OAM[q, l]|²)`.
    pub fn sinr(&self, budget: &LinkBudget) -> Result<Vec<f64>> {
        budget.validate()?;
        if budget.total_tx_power == 0.0 {
            return Ok(vec![0.0; self.n_modes()]);
        }
        let noise = budget.noise_power * self.n_modes() as f64 / (budget.total_tx_power * self.fold as f64);
        Ok(self
            .diagonal
            .iter()
            .zip(&self.offdiag_power_per_mode)
            .map(|(h, off)| h.norm_sqr() / (noise + off))
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    OamBlind,
    OamLs,
    Siso,
    Mimo,
    MimoWf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub per_mode_sinr: Vec<f64>,
    /// bits/s/Hz.
    pub total_bits: f64,
    pub scheme: Scheme,
    pub bounds: Option<(f64, f64)>,
}

impl CapacityReport {
    pub fn from_sinr(per_mode_sinr: Vec<f64>, scheme: Scheme) -> Self {
        let total_bits = per_mode_sinr.iter().map(|s| s.ln_1p()).sum::<f64>() / std::f64::consts::LN_2;
        CapacityReport { per_mode_sinr, total_bits, scheme, bounds: None }
    }

    /// Mean BPSK error probability over the streams, `(1/2N)·Σ erfc√SINR`.
    pub fn bpsk_ber(&self) -> f64 {
        ber_from_sinr(&self.per_mode_sinr)
    }
}

pub fn ber_from_sinr(sinr: &[f64]) -> f64 {
    if sinr.is_empty() {
        return 0.5;
    }
    sinr.iter().map(|s| libm::erfc(s.max(0.0).sqrt())).sum::<f64>() / (2.0 * sinr.len() as f64)
}

/// Blind-detection capacity from the reduced, diagonalized channel.
pub fn capacity_oam(ch: &ChannelMatrix, budget: &LinkBudget) -> Result<CapacityReport> {
    let sinr = OamSpectrum::from_channel(ch)?.sinr(budget)?;
    Ok(CapacityReport::from_sinr(sinr, Scheme::OamBlind))
}

/// BPSK error rate of blind detection, sharing the SINR of [`capacity_oam`].
pub fn ber_oam_analytic(ch: &ChannelMatrix, budget: &LinkBudget) -> Result<f64> {
    Ok(capacity_oam(ch, budget)?.bpsk_ber())
}

/// Per-mode SINR of LS detection with estimate `h_est` applied to `ch`.
pub fn ls_sinr(ch: &ChannelMatrix, h_est: &CMat, budget: &LinkBudget) -> Result<(Vec<f64>, f64)> {
    budget.validate()?;
    if h_est.shape() != ch.h.shape() {
        return Err(Error::Dimension(format!("estimate is {:?}, channel is {:?}", h_est.shape(), ch.h.shape())));
    }
    let p = pinv(h_est)?;
    let need = ch.n_rx().min(ch.n_tx());
    if p.rank < need {
        return Err(Error::RankDeficient { rank: p.rank, required: need });
    }
    let nt = ch.n_tx();
    let w = DftOperator::new(nt)?;
    let a = w.matrix.ad_mul(&p.matrix);
    let h_ls = &a * &ch.h * &w.matrix;
    let d = &a * a.adjoint();
    let per = budget.total_tx_power / nt as f64;
    let sinr = (0..nt)
        .map(|l| {
            let sig = h_ls[(l, l)].norm_sqr() * per;
            if sig == 0.0 {
                return 0.0;
            }
            let intf: f64 = (0..nt).filter(|&q| q != l).map(|q| h_ls[(l, q)].norm_sqr()).sum::<f64>() * per;
            sig / (intf + budget.noise_power * d[(l, l)].re)
        })
        .collect();
    Ok((sinr, p.condition))
}

/// Capacity of LS detection, `Wᴴ(Hᵉ)†` applied to the true channel.
pub fn capacity_ls(ch: &ChannelMatrix, h_est: &CMat, budget: &LinkBudget) -> Result<CapacityReport> {
    let (sinr, _) = ls_sinr(ch, h_est, budget)?;
    Ok(CapacityReport::from_sinr(sinr, Scheme::OamLs))
}

pub fn ber_ls(ch: &ChannelMatrix, h_est: &CMat, budget: &LinkBudget) -> Result<f64> {
    Ok(capacity_ls(ch, h_est, budget)?.bpsk_ber())
}

/// Single-coil link over `M_{1,1}` of `geom`.
pub fn capacity_siso(geom: &LinkGeometry, elec: &CoilElectrical, budget: &LinkBudget) -> Result<f64> {
    budget.validate()?;
    let m = mutual_tx_rx(geom, 1, 1, InductanceMethod::Elliptic)?;
    let g = (elec.omega() * m).powi(2) / elec.impedance.norm_sqr();
    Ok((budget.total_tx_power / budget.noise_power * g).ln_1p() / std::f64::consts::LN_2)
}
