//! Transmission and reception: OAM excitation, noise, blind and LS detection,
//! Zadoff–Chu pilots and Monte Carlo bit error rates.

mod ber;
mod detect;
mod dft;
mod pilot;

pub use ber::{run_ber, wilson_interval, BerDetector, BerOptions, BerPoint};
pub use detect::{detect_blind, detect_ls, BlindDetector, Constellation, Detection, LsDetector};
pub use dft::{circulant_eigenvalues, oam_excite, DftOperator};
pub use pilot::{
    estimate_channel_ls, gram_residual, ls_estimate_from, mse_ls, zc_pilot, MseReport, PilotConfig,
};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};

/// Transmit power, per-coil noise power and an SNR grid for sweeps.
///
/// SNR is `P_t / N_0` throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    /// `P_t`, watts per symbol period over all transmit coils.
    pub total_tx_power: f64,
    /// `N_0`, complex noise power per receive coil in watts.
    pub noise_power: f64,
    /// dB values used by SNR sweeps.
    #[serde(default)]
    pub snr_grid: Vec<f64>,
}

impl Default for LinkBudget {
    fn default() -> Self {
        LinkBudget { total_tx_power: 8.0, noise_power: 0.08, snr_grid: Vec::new() }
    }
}

impl LinkBudget {
    pub fn new(total_tx_power: f64, noise_power: f64) -> Result<Self> {
        let b = LinkBudget { total_tx_power, noise_power, snr_grid: Vec::new() };
        b.validate()?;
        Ok(b)
    }

    /// Powers must be finite; `P_t ≥ 0`, `N_0 > 0`.
    pub fn validate(&self) -> Result<()> {
        if !(self.total_tx_power.is_finite() && self.total_tx_power >= 0.0) {
            return Err(Error::Domain(format!("transmit power must be non-negative, got {}", self.total_tx_power)));
        }
        if !(self.noise_power.is_finite() && self.noise_power > 0.0) {
            return Err(Error::Domain(format!("noise power must be positive, got {}", self.noise_power)));
        }
        Ok(())
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * (self.total_tx_power / self.noise_power).log10()
    }

    /// Same `P_t`, with `N_0 = P_t / 10^(snr/10)`.
    pub fn at_snr_db(&self, snr_db: f64) -> Self {
        LinkBudget { noise_power: self.total_tx_power / 10f64.powf(snr_db / 10.0), ..self.clone() }
    }
}

/// One `CN(0, n0)` draw.
pub fn cn_sample<R: Rng + ?Sized>(rng: &mut R, n0: f64) -> Complex64 {
    let s = (n0 / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

pub fn cn_vector<R: Rng + ?Sized>(rng: &mut R, n: usize, n0: f64) -> CVec {
    CVec::from_fn(n, |_, _| cn_sample(rng, n0))
}

pub fn cn_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, n0: f64) -> CMat {
    CMat::from_fn(rows, cols, |_, _| cn_sample(rng, n0))
}

/// `vʳ = H·vᵗ + n` with i.i.d. `CN(0, n0)` noise per receive coil.
pub fn propagate<R: Rng + ?Sized>(ch: &ChannelMatrix, v_t: &CVec, n0: f64, rng: &mut R) -> Result<CVec> {
    if v_t.len() != ch.n_tx() {
        return Err(Error::Dimension(format!("excitation has {} entries for {} transmit coils", v_t.len(), ch.n_tx())));
    }
    if !(n0.is_finite() && n0 >= 0.0) {
        return Err(Error::Domain(format!("noise power must be non-negative, got {n0}")));
    }
    let clean = &ch.h * v_t;
    if n0 == 0.0 {
        return Ok(clean);
    }
    Ok(clean + cn_vector(rng, ch.n_rx(), n0))
}
