//! Complex channel matrices: assembly from inductances, row-averaging
//! reduction, circulant diagnostics, and import from S-parameters.

mod sparam;

pub use sparam::{import_s_parameters, SParameterDocument};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::LinkGeometry;
use crate::inductance::{
    build_inductance_matrices_with, CoilElectrical, InductanceMethod, MutualInductanceMatrix,
};
use crate::linalg::{max_abs, to_complex, CMat};

/// Where a channel came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelSource {
    Analytic,
    Imported,
}

/// Complex `N_r × N_t` voltage gain matrix.
#[derive(Debug, Clone)]
pub struct ChannelMatrix {
    pub h: CMat,
    pub source: ChannelSource,
    pub geometry: Option<LinkGeometry>,
    pub frequency: f64,
    pub inductance: Option<MutualInductanceMatrix>,
}

impl ChannelMatrix {
    /// Wraps an arbitrary gain matrix.
    pub fn from_matrix(h: CMat, frequency: f64, source: ChannelSource) -> Result<Self> {
        if h.nrows() == 0 || h.ncols() == 0 {
            return Err(Error::Dimension("channel must be at least 1x1".into()));
        }
        if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("channel has non-finite entries".into()));
        }
        Ok(ChannelMatrix { h, source, geometry: None, frequency, inductance: None })
    }

    /// Builds `M`, `Mᵗ` for `geom` and assembles `H`.
    pub fn analytic(
        geom: &LinkGeometry,
        elec: &CoilElectrical,
        method: InductanceMethod,
        crosstalk: bool,
    ) -> Result<Self> {
        let mi = build_inductance_matrices_with(geom, method)?;
        let mut ch = assemble_channel_with(&mi, elec, crosstalk)?;
        ch.geometry = Some(*geom);
        Ok(ch)
    }

    pub fn n_rx(&self) -> usize {
        self.h.nrows()
    }

    pub fn n_tx(&self) -> usize {
        self.h.ncols()
    }

    /// `N_r / N_t` when it is an integer.
    pub fn fold(&self) -> Option<usize> {
        (self.n_rx() % self.n_tx() == 0).then(|| self.n_rx() / self.n_tx())
    }
}

fn check_shapes(mi: &MutualInductanceMatrix) -> Result<()> {
    let nt = mi.tx_rx.ncols();
    if mi.tx_tx.shape() != (nt, nt) {
        return Err(Error::Dimension(format!(
            "crosstalk matrix is {:?}, expected {nt}x{nt}",
            mi.tx_tx.shape()
        )));
    }
    Ok(())
}

/// `H = (−jω/Z_t)·M − (ω²/Z_t²)·M·Mᵗ`, with the second term optional.
pub fn assemble_channel_with(
    mi: &MutualInductanceMatrix,
    elec: &CoilElectrical,
    crosstalk: bool,
) -> Result<ChannelMatrix> {
    check_shapes(mi)?;
    let (first, second) = channel_terms(mi, elec);
    let h = if crosstalk { first - second } else { first };
    let mut ch = ChannelMatrix::from_matrix(h, elec.frequency, ChannelSource::Analytic)?;
    ch.inductance = Some(mi.clone());
    Ok(ch)
}

/// Full channel including transmit crosstalk.
pub fn assemble_channel(mi: &MutualInductanceMatrix, elec: &CoilElectrical) -> Result<ChannelMatrix> {
    assemble_channel_with(mi, elec, true)
}

/// The two terms `(−jω/Z_t)·M` and `(ω²/Z_t²)·M·Mᵗ`.
pub fn channel_terms(mi: &MutualInductanceMatrix, elec: &CoilElectrical) -> (CMat, CMat) {
    let w = elec.omega();
    let z = elec.impedance;
    let m = to_complex(&mi.tx_rx);
    let mt = to_complex(&mi.tx_tx);
    let a = Complex64::new(0.0, -w) / z;
    let b = Complex64::new(w * w, 0.0) / (z * z);
    (m.map(|x| x * a), (&m * &mt).map(|x| x * b))
}

/// `max|(ω²/Z_t²)·M·Mᵗ| / max|H|`.
pub fn crosstalk_ratio(mi: &MutualInductanceMatrix, elec: &CoilElectrical) -> Result<f64> {
    check_shapes(mi)?;
    let (first, second) = channel_terms(mi, elec);
    let h = &first - &second;
    Ok(max_abs(&second) / max_abs(&h))
}

/// Row-averaged channel `Ĥ` and the fold `I = N_r / N_t`.
#[derive(Debug, Clone)]
pub struct ReducedChannel {
    pub h_hat: CMat,
    pub fold: usize,
}

/// `Ĥ[a, n] = (1/I)·Σᵢ H[i + I·(a − 1), n]`.
pub fn reduce_channel(ch: &ChannelMatrix) -> Result<ReducedChannel> {
    reduce_matrix(&ch.h).map(|(h_hat, fold)| ReducedChannel { h_hat, fold })
}

pub(crate) fn reduce_matrix(h: &CMat) -> Result<(CMat, usize)> {
    let (nr, nt) = h.shape();
    if nr % nt != 0 {
        return Err(Error::NotAMultiple { n_rx: nr, n_tx: nt });
    }
    let fold = nr / nt;
    let scale = 1.0 / fold as f64;
    let h_hat = CMat::from_fn(nt, nt, |a, n| {
        (0..fold).map(|i| h[(i + fold * a, n)]).sum::<Complex64>() * scale
    });
    Ok((h_hat, fold))
}

/// Largest departure from `h[i, j] = h[i+1, j+1]` (cyclic), relative to `max|h|`.
pub fn circulant_residual(rc: &ReducedChannel) -> f64 {
    matrix_circulant_residual(&rc.h_hat)
}

pub fn matrix_circulant_residual(h: &CMat) -> f64 {
    let n = h.nrows();
    let scale = max_abs(h);
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((h[(i, j)] - h[((i + 1) % n, (j + 1) % n)]).norm());
        }
    }
    worst / scale
}

/// Writes a matrix as `row,col,re,im` lines with 1-based indices.
pub fn matrix_to_csv(m: &CMat) -> String {
    let mut out = String::from("row,col,re,im\n");
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push_str(&format!("{},{},{:.17e},{:.17e}\n", i + 1, j + 1, z.re, z.im));
        }
    }
    out
}
