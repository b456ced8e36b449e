//! Globally adaptive Gauss–Kronrod quadrature in one and two dimensions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod abscissae (non-negative half) and weights, with the
// embedded 7-point Gauss weights at the odd-indexed abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Full 15-node rule on [-1, 1]: (node, kronrod weight, gauss weight).
fn rule() -> [(f64, f64, f64); 15] {
    let mut out = [(0.0, 0.0, 0.0); 15];
    for i in 0..7 {
        let g = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
        out[i] = (-XGK[i], WGK[i], g);
        out[14 - i] = (XGK[i], WGK[i], g);
    }
    out[7] = (0.0, WGK[7], WG[3]);
    out
}

/// Tolerances and evaluation budget.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    /// Absolute floor added to `rel_tol * |value|`.
    pub abs_tol: f64,
    pub max_evals: usize,
}

impl QuadOptions {
    pub fn relative(rel_tol: f64) -> Self {
        QuadOptions { rel_tol, abs_tol: 0.0, max_evals: 2_000_000 }
    }
}

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug)]
struct Piece<const D: usize> {
    lo: [f64; D],
    hi: [f64; D],
    value: f64,
    abs: f64,
    error: f64,
}

impl<const D: usize> PartialEq for Piece<D> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const D: usize> Eq for Piece<D> {}
impl<const D: usize> PartialOrd for Piece<D> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const D: usize> Ord for Piece<D> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rule_1d<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> Piece<1> {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let (mut k, mut g, mut a) = (0.0, 0.0, 0.0);
    for (x, wk, wg) in rule() {
        let v = f(c + h * x);
        k += wk * v;
        g += wg * v;
        a += wk * v.abs();
    }
    Piece { lo: [lo], hi: [hi], value: k * h, abs: a * h.abs(), error: ((k - g) * h).abs() }
}

fn rule_2d<F: FnMut(f64, f64) -> f64>(f: &mut F, lo: [f64; 2], hi: [f64; 2]) -> Piece<2> {
    let c = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    let h = [0.5 * (hi[0] - lo[0]), 0.5 * (hi[1] - lo[1])];
    let r = rule();
    let (mut k, mut g, mut a) = (0.0, 0.0, 0.0);
    for &(x, wkx, wgx) in &r {
        for &(y, wky, wgy) in &r {
            let v = f(c[0] + h[0] * x, c[1] + h[1] * y);
            k += wkx * wky * v;
            g += wgx * wgy * v;
            a += wkx * wky * v.abs();
        }
    }
    let area = h[0] * h[1];
    Piece { lo, hi, value: k * area, abs: a * area.abs(), error: ((k - g) * area).abs() }
}

fn drive<const D: usize>(
    first: Piece<D>,
    per_rule: usize,
    opts: QuadOptions,
    mut split: impl FnMut(&Piece<D>) -> Vec<Piece<D>>,
) -> Result<QuadEstimate> {
    if !(opts.rel_tol > 0.0) {
        return Err(Error::Domain("quadrature tolerance must be positive".into()));
    }
    let mut evals = per_rule;
    let (mut value, mut abs, mut error) = (first.value, first.abs, first.error);
    let mut heap = BinaryHeap::new();
    heap.push(first);
    loop {
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NonConvergence { estimate: value, error, evaluations: evals });
        }
        // Floor at rounding level relative to the L1 mass so integrals that
        // cancel to zero still terminate.
        let target = opts.rel_tol * value.abs() + opts.abs_tol.max(1e-15 * abs);
        if error <= target {
            return Ok(QuadEstimate { value, error, evaluations: evals });
        }
        if evals >= opts.max_evals {
            return Err(Error::NonConvergence { estimate: value, error, evaluations: evals });
        }
        let worst = heap.pop().expect("heap never empties");
        value -= worst.value;
        abs -= worst.abs;
        error -= worst.error;
        for child in split(&worst) {
            evals += per_rule;
            value += child.value;
            abs += child.abs;
            error += child.error;
            heap.push(child);
        }
        // Guard against drift in the running sums.
        if heap.len() % 256 == 0 {
            error = heap.iter().map(|p| p.error).sum();
            value = heap.iter().map(|p| p.value).sum();
        }
    }
}

/// Integrates `f` over `[lo, hi]`.
pub fn adaptive_quad_1d<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    opts: QuadOptions,
) -> Result<QuadEstimate> {
    let first = rule_1d(&mut f, lo, hi);
    drive(first, 15, opts, |p| {
        let mid = 0.5 * (p.lo[0] + p.hi[0]);
        vec![rule_1d(&mut f, p.lo[0], mid), rule_1d(&mut f, mid, p.hi[0])]
    })
}

/// Integrates `f` over the rectangle `[lo.0, hi.0] × [lo.1, hi.1]`.
pub fn adaptive_quad_rect<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    lo: [f64; 2],
    hi: [f64; 2],
    opts: QuadOptions,
) -> Result<QuadEstimate> {
    let first = rule_2d(&mut f, lo, hi);
    drive(first, 225, opts, |p| {
        let mid = [0.5 * (p.lo[0] + p.hi[0]), 0.5 * (p.lo[1] + p.hi[1])];
        vec![
            rule_2d(&mut f, p.lo, mid),
            rule_2d(&mut f, [mid[0], p.lo[1]], [p.hi[0], mid[1]]),
            rule_2d(&mut f, [p.lo[0], mid[1]], [mid[0], p.hi[1]]),
            rule_2d(&mut f, mid, p.hi),
        ]
    })
}

/// Integrates `f(t, φ)` over `[0, 2π]²` to relative tolerance `tol`.
pub fn adaptive_quad_2d<F: FnMut(f64, f64) -> f64>(f: F, tol: f64) -> Result<QuadEstimate> {
    let two_pi = 2.0 * std::f64::consts::PI;
    adaptive_quad_rect(f, [0.0, 0.0], [two_pi, two_pi], QuadOptions::relative(tol))
}
