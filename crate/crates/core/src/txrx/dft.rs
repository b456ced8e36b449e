use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};

/// Unitary `N_t`-point IDFT, `W[n1, n2] = exp(j2π(n1−1)(n2−1)/N_t)/√N_t`.
/// Column `l + 1` excites OAM mode `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct DftOperator {
    pub order: usize,
    pub matrix: CMat,
}

impl DftOperator {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Dimension("DFT order must be at least 1".into()));
        }
        let s = 1.0 / (order as f64).sqrt();
        let matrix = CMat::from_fn(order, order, |a, b| {
            let ph = 2.0 * PI * ((a * b) % order) as f64 / order as f64;
            Complex64::from_polar(s, ph)
        });
        Ok(DftOperator { order, matrix })
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.order {
            return Err(Error::Dimension(format!("vector of length {len} for a {}-point DFT", self.order)));
        }
        Ok(())
    }

    /// `vᵗ = W·x`.
    pub fn excite(&self, x: &CVec) -> Result<CVec> {
        self.check(x.len())?;
        Ok(&self.matrix * x)
    }

    /// `Wᴴ·v`.
    pub fn analyze(&self, v: &CVec) -> Result<CVec> {
        self.check(v.len())?;
        Ok(self.matrix.ad_mul(v))
    }

    /// `Wᴴ·A·W` for a square `A`.
    pub fn to_mode_domain(&self, a: &CMat) -> Result<CMat> {
        if a.shape() != (self.order, self.order) {
            return Err(Error::Dimension(format!("{:?} matrix for a {}-point DFT", a.shape(), self.order)));
        }
        Ok(self.matrix.ad_mul(a) * &self.matrix)
    }
}

/// Feeds per-mode symbols `x` to the coil ring.
pub fn oam_excite(x: &CVec, w: &DftOperator) -> Result<CVec> {
    w.excite(x)
}

/// Eigenvalues of the circulant matrix with first column `c`:
/// `λ_l = Σ_k c_k·exp(−j2πlk/N)`.
pub fn circulant_eigenvalues(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len();
    (0..n)
        .map(|l| {
            c.iter()
                .enumerate()
                .map(|(k, &ck)| ck * Complex64::from_polar(1.0, -2.0 * PI * ((l * k) % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::circulant;

    #[test]
    fn unitary_for_many_orders() {
        for n in 1..=24 {
            let w = DftOperator::new(n).unwrap();
            let g = w.matrix.ad_mul(&w.matrix);
            let err = (g - CMat::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-12, "n = {n}: {err}");
            for a in 0..n {
                assert!((w.matrix[(a, 0)] - Complex64::new(1.0 / (n as f64).sqrt(), 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn excitation_phases() {
        let w = DftOperator::new(8).unwrap();
        let mut x = CVec::zeros(8);
        x[0] = Complex64::new(1.0, 0.0);
        let v = w.excite(&x).unwrap();
        assert!(v.iter().all(|z| (z - v[0]).norm() < 1e-15));
        let mut x = CVec::zeros(8);
        x[1] = Complex64::new(1.0, 0.0);
        let v = w.excite(&x).unwrap();
        for a in 0..7 {
            let step = (v[a + 1] / v[a]).arg();
            assert!((step - 2.0 * PI / 8.0).abs() < 1e-12);
        }
        assert_eq!(w.excite(&CVec::zeros(8)).unwrap(), CVec::zeros(8));
        assert!(w.excite(&CVec::zeros(7)).is_err());
    }

    #[test]
    fn circular_convolution_identity() {
        // Wᴴ(Cv) = √N (Wᴴc) ∘ (Wᴴv)
        let n = 7;
        let c: Vec<Complex64> = (0..n).map(|k| Complex64::new((k as f64).sin(), 0.3 * k as f64)).collect();
        let v = CVec::from_fn(n, |k, _| Complex64::new(1.0 / (k as f64 + 1.0), (k as f64).cos()));
        let w = DftOperator::new(n).unwrap();
        let lhs = w.analyze(&(circulant(&c) * &v)).unwrap();
        let wc = w.analyze(&CVec::from_vec(c.clone())).unwrap();
        let wv = w.analyze(&v).unwrap();
        for k in 0..n {
            let rhs = wc[k] * wv[k] * (n as f64).sqrt();
            assert!((lhs[k] - rhs).norm() < 1e-10);
        }
        let lam = circulant_eigenvalues(&c);
        let d = w.to_mode_domain(&circulant(&c)).unwrap();
        for l in 0..n {
            assert!((d[(l, l)] - lam[l]).norm() < 1e-12);
        }
    }
}
