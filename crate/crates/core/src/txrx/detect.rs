use num_complex::Complex64;
use rand::Rng;

use super::DftOperator;
use crate::channel::{reduce_matrix, ChannelMatrix};
use crate::error::{Error, Result};
use crate::linalg::{pinv_full_column_rank, CMat, CVec};

/// Finite symbol alphabet for hard decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    pub points: Vec<Complex64>,
}

impl Constellation {
    pub fn bpsk() -> Self {
        Constellation { points: vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)] }
    }

    pub fn scaled(&self, amplitude: f64) -> Self {
        Constellation { points: self.points.iter().map(|p| p * amplitude).collect() }
    }

    /// Nearest point.
    pub fn slice(&self, z: Complex64) -> Complex64 {
        *self
            .points
            .iter()
            .min_by(|a, b| (*a - z).norm_sqr().total_cmp(&(*b - z).norm_sqr()))
            .expect("constellation is never empty")
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        self.points[rng.random_range(0..self.points.len())]
    }
}

/// Per-mode soft estimates and hard decisions. Modes with no usable gain
/// carry `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub soft: CVec,
    pub symbols: Vec<Option<Complex64>>,
}

impl Detection {
    fn sliced(soft: CVec, usable: impl Fn(usize) -> bool, constellation: &Constellation) -> Self {
        let symbols = soft.iter().enumerate().map(|(l, &z)| usable(l).then(|| constellation.slice(z))).collect();
        Detection { soft, symbols }
    }
}

/// Detector that needs only the diagonal mode gains `h_OAM`.
#[derive(Debug, Clone)]
pub struct BlindDetector {
    pub dft: DftOperator,
    pub fold: usize,
    pub gains: Vec<Complex64>,
    pub undetectable: Vec<usize>,
}

/// Gains below this fraction of the largest are treated as zero.
const GAIN_FLOOR: f64 = 1e-12;

impl BlindDetector {
    /// Gains taken from `diag(Wᴴ·Ĥ·W)` of `ch` itself.
    pub fn from_channel(ch: &ChannelMatrix) -> Result<Self> {
        let (h_hat, fold) = reduce_matrix(&ch.h)?;
        let dft = DftOperator::new(ch.n_tx())?;
        let d = dft.to_mode_domain(&h_hat)?;
        let gains = (0..ch.n_tx()).map(|l| d[(l, l)]).collect();
        Self::from_gains(gains, fold)
    }

    /// Explicit gains, e.g. those of the nominal aligned geometry.
    pub fn from_gains(gains: Vec<Complex64>, fold: usize) -> Result<Self> {
        if gains.is_empty() || fold == 0 {
            return Err(Error::Dimension("blind detector needs at least one mode and fold ≥ 1".into()));
        }
        let dft = DftOperator::new(gains.len())?;
        let top = gains.iter().map(|g| g.norm()).fold(0.0, f64::max);
        let undetectable = gains
            .iter()
            .enumerate()
            .filter(|(_, g)| !(g.norm() > GAIN_FLOOR * top && top > 0.0))
            .map(|(l, _)| l)
            .collect();
        Ok(BlindDetector { dft, fold, gains, undetectable })
    }

    pub fn n_tx(&self) -> usize {
        self.gains.len()
    }

    /// `x̂ = diag(h_OAM)⁻¹·Wᴴ·v̂ʳ`; undetectable modes get 0.
    pub fn soft(&self, v_r: &CVec) -> Result<CVec> {
        let nt = self.n_tx();
        if v_r.len() != nt * self.fold {
            return Err(Error::Dimension(format!("received vector has {} entries, expected {}", v_r.len(), nt * self.fold)));
        }
        let scale = 1.0 / self.fold as f64;
        let v_hat = CVec::from_fn(nt, |a, _| (0..self.fold).map(|i| v_r[i + self.fold * a]).sum::<Complex64>() * scale);
        let y = self.dft.analyze(&v_hat)?;
        Ok(CVec::from_fn(nt, |l, _| {
            if self.undetectable.contains(&l) {
                Complex64::new(0.0, 0.0)
            } else {
                y[l] / self.gains[l]
            }
        }))
    }

    pub fn detect(&self, v_r: &CVec, constellation: &Constellation) -> Result<Detection> {
        let soft = self.soft(v_r)?;
        Ok(Detection::sliced(soft, |l| !self.undetectable.contains(&l), constellation))
    }
}

/// Blind detection of every received vector with gains from `ch`.
pub fn detect_blind(ch: &ChannelMatrix, v_r_samples: &[CVec], constellation: &Constellation) -> Result<Vec<Detection>> {
    let det = BlindDetector::from_channel(ch)?;
    v_r_samples.iter().map(|v| det.detect(v, constellation)).collect()
}

/// Zero-forcing detector `x̂ = Wᴴ·(Hᵉ)†·vʳ`.
#[derive(Debug, Clone)]
pub struct LsDetector {
    pub equalizer: CMat,
    pub condition: f64,
    pub rank: usize,
}

impl LsDetector {
    pub fn new(h_est: &CMat) -> Result<Self> {
        let p = pinv_full_column_rank(h_est)?;
        let w = DftOperator::new(h_est.ncols())?;
        Ok(LsDetector { equalizer: w.matrix.ad_mul(&p.matrix), condition: p.condition, rank: p.rank })
    }

    pub fn soft(&self, v_r: &CVec) -> Result<CVec> {
        if v_r.len() != self.equalizer.ncols() {
            return Err(Error::Dimension(format!(
                "received vector has {} entries, expected {}",
                v_r.len(),
                self.equalizer.ncols()
            )));
        }
        Ok(&self.equalizer * v_r)
    }

    pub fn detect(&self, v_r: &CVec, constellation: &Constellation) -> Result<Detection> {
        Ok(Detection::sliced(self.soft(v_r)?, |_| true, constellation))
    }
}

pub fn detect_ls(ch: &ChannelMatrix, h_est: &CMat, v_r: &CVec, constellation: &Constellation) -> Result<Detection> {
    if h_est.shape() != ch.h.shape() {
        return Err(Error::Dimension(format!("estimate is {:?}, channel is {:?}", h_est.shape(), ch.h.shape())));
    }
    LsDetector::new(h_est)?.detect(v_r, constellation)
}
