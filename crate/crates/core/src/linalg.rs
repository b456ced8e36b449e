//! Small complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Singular values below this fraction of the largest are treated as zero.
pub const PINV_CUTOFF: f64 = 1e-12;

/// Moore–Penrose pseudo-inverse with its numerical rank and condition number.
#[derive(Debug, Clone)]
pub struct PseudoInverse {
    pub matrix: CMat,
    pub rank: usize,
    /// Largest over smallest singular value (infinite when rank deficient).
    pub condition: f64,
    pub singular_values: Vec<f64>,
}

pub fn pinv(a: &CMat) -> Result<PseudoInverse> {
    let (r, c) = a.shape();
    if r == 0 || c == 0 {
        return Err(Error::Dimension("pseudo-inverse of an empty matrix".into()));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^H");
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = s.iter().copied().fold(0.0, f64::max);
    let smin = s.iter().copied().fold(f64::INFINITY, f64::min);
    let cut = PINV_CUTOFF * smax;
    let mut out = CMat::zeros(c, r);
    let mut rank = 0;
    for (k, &sk) in s.iter().enumerate() {
        if sk > cut && sk > 0.0 {
            rank += 1;
            let vk = v_t.row(k).adjoint();
            let uk = u.column(k).adjoint();
            out += (vk * uk).unscale(sk);
        }
    }
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    Ok(PseudoInverse { matrix: out, rank, condition, singular_values: s })
}

/// Pseudo-inverse that must have full column rank.
pub fn pinv_full_column_rank(a: &CMat) -> Result<PseudoInverse> {
    let p = pinv(a)?;
    if p.rank < a.ncols() {
        return Err(Error::RankDeficient { rank: p.rank, required: a.ncols() });
    }
    Ok(p)
}

/// Circulant matrix `C[a, b] = c[(a − b) mod N]`.
pub fn circulant(first_col: &[Complex64]) -> CMat {
    let n = first_col.len();
    CMat::from_fn(n, n, |a, b| first_col[(a + n - b) % n])
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Squared singular values of `a`.
pub fn gram_eigenvalues(a: &CMat) -> Vec<f64> {
    a.clone().singular_values().iter().map(|s| s * s).collect()
}
