use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{estimate_channel_ls, propagate, BlindDetector, Constellation, DftOperator, LinkBudget, LsDetector, PilotConfig};
use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::linalg::CVec;
use crate::metrics;

/// Which receiver `run_ber` simulates.
#[derive(Debug, Clone, PartialEq)]
pub enum BerDetector {
    /// Gains from the channel itself unless given explicitly.
    Blind { gains: Option<Vec<Complex64>> },
    /// The channel is re-estimated from pilots at the start of every frame.
    Ls { pilot: PilotConfig },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerOptions {
    pub bits_per_point: usize,
    /// Symbol vectors per LS channel estimate.
    pub frame_len: usize,
    /// Two-sided normal quantile for the Wilson interval.
    pub z: f64,
}

impl Default for BerOptions {
    fn default() -> Self {
        BerOptions { bits_per_point: 1_000_000, frame_len: 100, z: 1.96 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub snr_db: f64,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Closed-form counterpart when one applies.
    pub analytic: Option<f64>,
}

impl BerPoint {
    /// Binomial standard deviation of the estimate at probability `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.bits as f64).sqrt()
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

enum Receiver {
    Blind(BlindDetector),
    Ls(PilotConfig),
}

fn count_errors(
    ch: &ChannelMatrix,
    budget: &LinkBudget,
    rx: &Receiver,
    opts: &BerOptions,
    seed: u64,
) -> Result<(u64, u64)> {
    let nt = ch.n_tx();
    let w = DftOperator::new(nt)?;
    let amp = (budget.total_tx_power / nt as f64).sqrt();
    let alphabet = Constellation::bpsk().scaled(amp);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vectors = opts.bits_per_point.div_ceil(nt);
    let mut errors = 0u64;
    let mut ls: Option<LsDetector> = None;
    for t in 0..vectors {
        if let Receiver::Ls(cfg) = rx {
            if t % opts.frame_len.max(1) == 0 {
                ls = Some(LsDetector::new(&estimate_channel_ls(ch, cfg, &mut rng)?)?);
            }
        }
        let x = CVec::from_fn(nt, |_, _| alphabet.random(&mut rng));
        let vr = propagate(ch, &w.excite(&x)?, budget.noise_power, &mut rng)?;
        let det = match rx {
            Receiver::Blind(b) => b.detect(&vr, &alphabet)?,
            Receiver::Ls(_) => ls.as_ref().expect("estimated at frame start").detect(&vr, &alphabet)?,
        };
        for (s, xi) in det.symbols.iter().zip(x.iter()) {
            // undetectable modes are guessed
            let s = s.unwrap_or_else(|| alphabet.random(&mut rng));
            errors += u64::from(s != *xi);
        }
    }
    Ok((errors, (vectors * nt) as u64))
}

/// Monte Carlo BPSK bit error rate at each SNR in `budget.snr_grid`
/// (the budget's own SNR when the grid is empty). Each point draws from its
/// own stream seeded from `rng`, so results do not depend on thread count.
pub fn run_ber<R: Rng + ?Sized>(
    ch: &ChannelMatrix,
    budget: &LinkBudget,
    detector: &BerDetector,
    opts: &BerOptions,
    rng: &mut R,
) -> Result<Vec<BerPoint>> {
    budget.validate()?;
    if opts.bits_per_point == 0 {
        return Err(Error::Domain("bits_per_point must be positive".into()));
    }
    let rx = match detector {
        BerDetector::Blind { gains: None } => Receiver::Blind(BlindDetector::from_channel(ch)?),
        BerDetector::Blind { gains: Some(g) } => {
            let fold = ch.fold().ok_or(Error::NotAMultiple { n_rx: ch.n_rx(), n_tx: ch.n_tx() })?;
            if g.len() != ch.n_tx() {
                return Err(Error::Dimension(format!("{} gains for {} modes", g.len(), ch.n_tx())));
            }
            Receiver::Blind(BlindDetector::from_gains(g.clone(), fold)?)
        }
        BerDetector::Ls { pilot } => {
            pilot.validate_for(ch.n_tx(), ch.n_rx())?;
            Receiver::Ls(*pilot)
        }
    };
    let grid = if budget.snr_grid.is_empty() { vec![budget.snr_db()] } else { budget.snr_grid.clone() };
    let seeds: Vec<u64> = grid.iter().map(|_| rng.random()).collect();
    grid.par_iter()
        .zip(seeds.par_iter())
        .map(|(&snr, &seed)| {
            let b = budget.at_snr_db(snr);
            let (errors, bits) = count_errors(ch, &b, &rx, opts, seed)?;
            let (ci_low, ci_high) = wilson_interval(errors, bits, opts.z);
            let analytic = match detector {
                BerDetector::Blind { gains: None } => Some(metrics::ber_oam_analytic(ch, &b)?),
                BerDetector::Ls { .. } => Some(metrics::ber_ls(ch, &ch.h, &b)?),
                BerDetector::Blind { .. } => None,
            };
            Ok(BerPoint { snr_db: snr, bits, errors, ber: errors as f64 / bits as f64, ci_low, ci_high, analytic })
        })
        .collect()
}
