//! Scalar root finding shared by the Toda and Hill spectra.

use crate::error::{Error, Result};

/// Brent's method on a bracket with `f(a) f(b) <= 0`, stopping once the
/// bracket is narrower than `xtol(x)`.
pub fn brent<F, T>(mut f: F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, xtol: T) -> f64
where
    F: FnMut(f64) -> f64,
    T: Fn(f64) -> f64,
{
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    debug_assert!(fa.signum() != fb.signum(), "brent called without a sign change");
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 0.5 * xtol(b) + 2.0 * f64::EPSILON * b.abs();
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return b;
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    b
}

/// Bracketed root of `g` where `g` returns `(value, derivative)`: Brent down to
/// `1e-13 (1 + |x|)`, then up to three Newton steps kept inside the bracket.
pub fn bracketed_root<G>(mut g: G, lo: f64, hi: f64, glo: f64, ghi: f64) -> f64
where
    G: FnMut(f64) -> (f64, f64),
{
    let x = brent(|x| g(x).0, lo, hi, glo, ghi, |x| 1e-13 * (1.0 + x.abs()));
    polish(g, x, lo, hi)
}

fn polish<G>(mut g: G, mut x: f64, lo: f64, hi: f64) -> f64
where
    G: FnMut(f64) -> (f64, f64),
{
    let (mut v, mut dv) = g(x);
    for _ in 0..3 {
        if v == 0.0 || dv == 0.0 || !dv.is_finite() {
            break;
        }
        let nx = x - v / dv;
        if !(nx >= lo && nx <= hi) {
            break;
        }
        let (nv, ndv) = g(nx);
        if nv.abs() > v.abs() {
            break;
        }
        x = nx;
        v = nv;
        dv = ndv;
    }
    x
}

/// Finds the zeros of `f` in a union of intervals `[c_i - r, c_i + r]`,
/// one zero per interval centre and at most the given count overall.
///
/// Overlapping intervals are merged into clusters; a cluster with `m`
/// centres is scanned on a grid that is refined until `m` sign changes are
/// seen, each of which is then refined by Brent's method. The caller
/// guarantees the zeros are simple and that every zero lies in the union.
pub fn clustered_zeros<F>(mut f: F, centres: &[f64], radius: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> f64,
{
    let mut out = Vec::with_capacity(centres.len());
    let mut i = 0;
    while i < centres.len() {
        let mut j = i;
        while j + 1 < centres.len() && centres[j + 1] - radius <= centres[j] + radius {
            j += 1;
        }
        let count = j - i + 1;
        let lo = centres[i] - radius;
        let hi = centres[j] + radius;
        let mut grid = (2 * count).max(1);
        let found = loop {
            let xs: Vec<f64> = (0..=grid).map(|k| lo + (hi - lo) * k as f64 / grid as f64).collect();
            let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
            let changes: Vec<usize> = (0..grid).filter(|&k| sgn(vs[k]) != sgn(vs[k + 1])).collect();
            if changes.len() == count {
                let mut roots = Vec::with_capacity(count);
                for k in changes {
                    roots.push(brent(&mut f, xs[k], xs[k + 1], vs[k], vs[k + 1], |x| 4.0 * f64::EPSILON * (1.0 + x.abs())));
                }
                break roots;
            }
            if changes.len() > count || grid > 1 << 20 {
                return Err(Error::BracketFailure {
                    n: i + 1,
                    detail: format!("found {} sign changes for {} expected zeros in [{lo}, {hi}]", changes.len(), count),
                });
            }
            grid *= 4;
        };
        out.extend(found);
        i = j + 1;
    }
    Ok(out)
}

fn sgn(v: f64) -> bool {
    v >= 0.0
}

/// Product of many moderate factors without intermediate overflow;
/// returns `(mantissa, log_scale)` with value `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledProduct {
    value: f64,
    log_scale: f64,
}

impl Default for ScaledProduct {
    fn default() -> Self {
        ScaledProduct { value: 1.0, log_scale: 0.0 }
    }
}

impl ScaledProduct {
    pub fn mul(&mut self, x: f64) {
        self.value *= x;
        let a = self.value.abs();
        if a > 1e150 || (a < 1e-150 && a > 0.0) {
            self.log_scale += a.ln();
            self.value = self.value.signum();
        }
    }

    pub fn ln_abs(&self) -> f64 {
        self.value.abs().ln() + self.log_scale
    }

    pub fn value(&self) -> f64 {
        self.value * self.log_scale.exp()
    }
}
