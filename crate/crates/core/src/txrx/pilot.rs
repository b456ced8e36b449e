use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{cn_matrix, Constellation, DftOperator, LinkBudget};
use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::linalg::{pinv, CMat, CVec};

/// Zadoff–Chu pilot parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PilotConfig {
    /// Sequence length `T`.
    pub length: usize,
    /// Root index `p`, coprime with `T`.
    pub root: usize,
    /// Per-coil pilot SNR `P`, linear.
    pub pilot_snr: f64,
}

impl Default for PilotConfig {
    fn default() -> Self {
        PilotConfig { length: 17, root: 1, pilot_snr: 1e4 }
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl PilotConfig {
    pub fn with_snr_db(self, db: f64) -> Self {
        PilotConfig { pilot_snr: 10f64.powf(db / 10.0), ..self }
    }

    fn check_sequence(&self) -> Result<()> {
        if self.length < 2 || self.root == 0 || gcd(self.root, self.length) != 1 {
            return Err(Error::Pilot(format!(
                "root {} must be a positive integer coprime with length {}",
                self.root, self.length
            )));
        }
        Ok(())
    }

    /// Checks `gcd(p, T) = 1`, `T > N_t`, `T > N_r` and `P > 0`.
    pub fn validate_for(&self, n_tx: usize, n_rx: usize) -> Result<()> {
        self.check_sequence()?;
        if self.length <= n_tx.max(n_rx) {
            return Err(Error::Pilot(format!(
                "length {} must exceed both N_t = {n_tx} and N_r = {n_rx}",
                self.length
            )));
        }
        if !(self.pilot_snr.is_finite() && self.pilot_snr > 0.0) {
            return Err(Error::Pilot(format!("pilot SNR must be positive, got {}", self.pilot_snr)));
        }
        Ok(())
    }
}

/// `N_t × T` pilot; row `n` is the root sequence cyclically delayed by `n − 1`.
pub fn zc_pilot(cfg: &PilotConfig, n_t: usize) -> Result<CMat> {
    cfg.check_sequence()?;
    let t_len = cfg.length;
    if n_t == 0 || t_len <= n_t {
        return Err(Error::Pilot(format!("length {t_len} must exceed N_t = {n_t}")));
    }
    let p = cfg.root as u128;
    let tl = t_len as u128;
    Ok(CMat::from_fn(n_t, t_len, |n, t| {
        let k = ((t + t_len - n) % t_len) as u128;
        // exponent numerator reduced mod 2T keeps the phase exact for large indices
        let num = if t_len % 2 == 0 { p * k * k } else { p * k * (k + 1) } % (2 * tl);
        Complex64::from_polar(1.0, -PI * num as f64 / t_len as f64)
    }))
}

/// `max|S̃·S̃ᴴ − T·I| / T`.
pub fn gram_residual(s: &CMat) -> f64 {
    let t = s.ncols() as f64;
    let g = s * s.adjoint();
    let n = g.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { t } else { 0.0 };
            worst = worst.max((g[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst / t
}

/// `Hᵉ = R̃·S̃ᴴ/(√P·T)` with `R̃ = √P·H·S̃ + N` for a given noise matrix.
pub fn ls_estimate_from(h: &CMat, pilot: &CMat, pilot_snr: f64, noise: &CMat) -> Result<CMat> {
    if pilot.nrows() != h.ncols() || noise.shape() != (h.nrows(), pilot.ncols()) {
        return Err(Error::Dimension("pilot, channel and noise shapes disagree".into()));
    }
    let sp = pilot_snr.sqrt();
    let r = h * pilot * Complex64::new(sp, 0.0) + noise;
    Ok(r * pilot.adjoint() / Complex64::new(sp * pilot.ncols() as f64, 0.0))
}

/// LS channel estimate with unit-variance complex Gaussian pilot noise.
pub fn estimate_channel_ls<R: Rng + ?Sized>(ch: &ChannelMatrix, cfg: &PilotConfig, rng: &mut R) -> Result<CMat> {
    cfg.validate_for(ch.n_tx(), ch.n_rx())?;
    let s = zc_pilot(cfg, ch.n_tx())?;
    let noise = cn_matrix(rng, ch.n_rx(), cfg.length, 1.0);
    ls_estimate_from(&ch.h, &s, cfg.pilot_snr, &noise)
}

/// Monte Carlo MSE per symbol of the LS detector and its high-pilot-SNR limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseReport {
    pub mse: f64,
    /// `(N_0/N_t)·‖H†‖_F²`.
    pub limit: f64,
    pub trials: usize,
}

/// `(1/N_t)·E‖Wᴴ(Hᵉ)†vʳ − x‖²`, re-estimating the channel every trial.
pub fn mse_ls<R: Rng + ?Sized>(
    ch: &ChannelMatrix,
    cfg: &PilotConfig,
    budget: &LinkBudget,
    rng: &mut R,
    trials: usize,
) -> Result<MseReport> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    budget.validate()?;
    let nt = ch.n_tx();
    let w = DftOperator::new(nt)?;
    let bpsk = Constellation::bpsk();
    let amp = (budget.total_tx_power / nt as f64).sqrt();
    let mut acc = 0.0;
    for _ in 0..trials {
        let he = estimate_channel_ls(ch, cfg, rng)?;
        let eq = w.matrix.ad_mul(&pinv(&he)?.matrix);
        let x = CVec::from_fn(nt, |_, _| bpsk.random(rng) * amp);
        let vr = super::propagate(ch, &w.excite(&x)?, budget.noise_power, rng)?;
        acc += (eq * vr - &x).norm_squared() / nt as f64;
    }
    let hp = pinv(&ch.h)?.matrix;
    Ok(MseReport {
        mse: acc / trials as f64,
        limit: budget.noise_power / nt as f64 * hp.norm_squared(),
        trials,
    })
}
