//! Quadrature on `[0, pi]` after the cosine substitution `mu = c - h cos(theta)`.
//!
//! Integrands with inverse square-root endpoint behaviour become smooth in
//! `theta`, so the midpoint rule converges geometrically; near-singular
//! integrands go through adaptive Gauss-Kronrod instead.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Relative tolerance for node doubling.
pub const QUAD_TOL: f64 = 1e-11;
/// Upper limit on the node count of a single doubling sequence.
pub const MAX_NODES: usize = 1 << 16;

/// A point of `[lo, hi]` given together with its distances to both ends,
/// which are computed from `theta` without cancellation.
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub theta: f64,
    pub x: f64,
    /// `x - lo >= 0`
    pub d_lo: f64,
    /// `hi - x >= 0`
    pub d_hi: f64,
}

impl Node {
    pub fn on(lo: f64, hi: f64, theta: f64) -> Node {
        let h = 0.5 * (hi - lo);
        let s = (0.5 * theta).sin();
        let c = (0.5 * theta).cos();
        let d_lo = 2.0 * h * s * s;
        let d_hi = 2.0 * h * c * c;
        let x = if d_lo <= d_hi { lo + d_lo } else { hi - d_hi };
        Node { theta, x, d_lo, d_hi }
    }

    /// `x - p`, accurate when `p` is close to one of the ends.
    pub fn minus(&self, p: f64, lo: f64, hi: f64) -> f64 {
        if (p - lo).abs() <= (hi - p).abs() {
            (lo - p) + self.d_lo
        } else {
            (hi - p) - self.d_hi
        }
    }

    /// `sqrt((x - lo)(hi - x)) = h sin(theta)`.
    pub fn weight(&self, lo: f64, hi: f64) -> f64 {
        0.5 * (hi - lo) * self.theta.sin()
    }
}

/// Midpoint nodes `theta_i = (i - 1/2) pi / m`.
pub fn midpoint_thetas(m: usize) -> impl Iterator<Item = f64> {
    (0..m).map(move |i| (i as f64 + 0.5) * PI / m as f64)
}

/// `int_0^pi g(theta) d theta` by the midpoint rule with node doubling,
/// starting from `m0` nodes, until the change is below `max(tol |I|, abs_tol)`.
/// The absolute floor keeps integrands that carry evaluation noise from
/// chasing digits they do not have.
pub fn theta_doubling<F>(mut g: F, m0: usize, tol: f64, abs_tol: f64, max_nodes: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut out = [0.0];
    theta_doubling_vec(1, |t, v| {
        let _: () = v[0] = g(t)?;
        Ok(())
    }, m0, tol, abs_tol, max_nodes, &mut out)?;
    Ok(out[0])
}

/// Vector-valued version of [`theta_doubling`]; `g(theta, out)` fills `out`.
/// Convergence is measured by the max-norm of the change against the max-norm of the result.
pub fn theta_doubling_vec<F>(
    dim: usize,
    mut g: F,
    m0: usize,
    tol: f64,
    abs_tol: f64,
    max_nodes: usize,
    result: &mut [f64],
) -> Result<usize>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    let mut buf = vec![0.0; dim];
    let mut prev: Option<Vec<f64>> = None;
    let mut m = m0.max(2);
    while m <= max_nodes {
        let mut acc = vec![0.0; dim];
        for t in midpoint_thetas(m) {
            g(t, &mut buf)?;
            for (a, b) in acc.iter_mut().zip(&buf) {
                *a += b;
            }
        }
        let w = PI / m as f64;
        acc.iter_mut().for_each(|a| *a *= w);
        if let Some(p) = prev {
            let scale = acc.iter().fold(0.0f64, |s, x| s.max(x.abs()));
            let diff = acc.iter().zip(&p).fold(0.0f64, |s, (x, y)| s.max((x - y).abs()));
            if diff <= (tol * scale).max(abs_tol) || scale == 0.0 {
                result.copy_from_slice(&acc);
                return Ok(m);
            }
        }
        prev = Some(acc);
        m *= 2;
    }
    Err(Error::NoConvergence { max_nodes })
}

/// `arcosh(x)` for `x >= 1`, written through `ln_1p` so that `x -> 1+` keeps
/// full relative accuracy; a two-term series takes over for `x - 1 < 1e-8`.
pub fn arcosh(x: f64) -> f64 {
    let t = x - 1.0;
    if t <= 0.0 {
        0.0
    } else if t < 1e-8 {
        (2.0 * t).sqrt() * (1.0 - t / 12.0)
    } else {
        (t + (t * (2.0 + t)).sqrt()).ln_1p()
    }
}

/// `arccos` with the argument clamped to `[-1, 1]`.
pub fn arccos_clamped(x: f64) -> f64 {
    x.clamp(-1.0, 1.0).acos()
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx)? + f(c + dx)?;
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
}

/// Adaptive Gauss-Kronrod (7/15) on `[a, b]` with global error target
/// `max(abs_tol, rel_tol * |I|)`.
pub fn adaptive_gk<F>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    const MAX_INTERVALS: usize = 4000;
    let (v, e) = gk15(&mut f, a, b)?;
    let mut parts = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > abs_tol.max(rel_tol * total.abs()) {
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::NoConvergence { max_nodes: 15 * MAX_INTERVALS });
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, v0, e0) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval exhausted at machine resolution: accept it as is
            parts.push((lo, hi, v0, 0.0));
            err -= e0;
            continue;
        }
        let (v1, e1) = gk15(&mut f, lo, mid)?;
        let (v2, e2) = gk15(&mut f, mid, hi)?;
        total += v1 + v2 - v0;
        err += e1 + e2 - e0;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    // re-sum to shed accumulated rounding in the running total
    Ok(parts.iter().map(|p| p.2).sum())
}
