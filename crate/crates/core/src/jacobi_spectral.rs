//! Discriminant of the periodic Jacobi matrix, its periodic spectrum and the
//! signed square roots of `Delta^2 - 4` and `chi`.

use std::f64::consts::PI;

use rayon::prelude::*;
use crate::dd::Dd;

use crate::error::{Error, Result};
use crate::roots::{bracketed_root, clustered_zeros, ScaledProduct};
use crate::toda_model::TodaState;

/// Gaps with `gamma < DEGENERACY_REL * width` are recorded as exactly closed.
pub const DEGENERACY_REL: f64 = 1e-11;
/// Relative distance to an eigenvalue below which canonical roots are refused.
pub const BOUNDARY_REL: f64 = 1e-12;
/// Closed-gap test: `s_n Delta(dot lambda_n) - 2` within this many noise bounds of 0.
const NOISE_FACTOR: f64 = 8.0;
/// Gaps narrower than this fraction of the width are re-located in double-double.
const REFINE_REL: f64 = 1e-4;

type M2 = [[f64; 2]; 2];

fn mul(x: &M2, y: &M2) -> M2 {
    [
        [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
        [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
    ]
}

fn add(x: &M2, y: &M2) -> M2 {
    [[x[0][0] + y[0][0], x[0][1] + y[0][1]], [x[1][0] + y[1][0], x[1][1] + y[1][1]]]
}

fn fro(x: &M2) -> f64 {
    (x[0][0].powi(2) + x[0][1].powi(2) + x[1][0].powi(2) + x[1][1].powi(2)).sqrt()
}

/// Edge orientation for `mu`: `+1` above the mean of `b`, `-1` below.
fn edge_sign(state: &TodaState, mu: f64) -> f64 {
    if mu >= state.trace_p() / state.len() as f64 {
        1.0
    } else {
        -1.0
    }
}

/// One step of the recursion written for `u_k = sigma^k y(k)` and the
/// difference `v_k = u_{k+1} - u_k`, taking `(u_k, v_{k-1})` to `(u_{k+1}, v_k)`.
/// Near the spectral edge `2 sigma` the step is close to the identity, so the
/// products stay bounded and rounding does not pile up the way it does for
/// the plain transfer matrices. Returns the step, its `mu` derivative and the
/// magnitude entering the rounding of `c_k`.
fn step(state: &TodaState, k: i64, mu: f64, sigma: f64) -> (M2, M2, f64) {
    let ak = state.a_at(k);
    let am = state.a_at(k - 1);
    let x = sigma * (mu - state.b_at(k));
    let c = (x - ak - am) / ak;
    let r = am / ak;
    let d = sigma / ak;
    ([[1.0 + c, r], [c, r]], [[d, 0.0], [d, 0.0]], (x.abs() + ak + am) / ak)
}

fn sign_pow(sigma: f64, n: usize) -> f64 {
    if sigma < 0.0 && n % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// `(Delta_N(mu), dDelta_N/dmu)` from the monodromy of the three-term recursion
/// `a_{k-1} y(k-1) + b_k y(k) + a_k y(k+1) = mu y(k)`. The monodromy is
/// conjugate to the product of the difference-form steps, up to `sigma^N`.
pub fn discriminant(state: &TodaState, mu: f64) -> (f64, f64) {
    let sigma = edge_sign(state, mu);
    let mut m: M2 = [[1.0, 0.0], [0.0, 1.0]];
    let mut dm: M2 = [[0.0; 2]; 2];
    for k in 1..=state.len() as i64 {
        let (t, dt, _) = step(state, k, mu, sigma);
        dm = add(&mul(&t, &dm), &mul(&dt, &m));
        m = mul(&t, &m);
    }
    let s = sign_pow(sigma, state.len());
    (s * (m[0][0] + m[1][1]), s * (dm[0][0] + dm[1][1]))
}

type D2 = [[Dd; 2]; 2];

const ZERO: Dd = Dd::ZERO;
const ONE: Dd = Dd::ONE;

fn mul_dd(x: &D2, y: &D2) -> D2 {
    [
        [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
        [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
    ]
}

/// `(Delta_N(mu) - target, dDelta_N/dmu)` with the recursion carried out in
/// double-double, so the difference keeps its digits where `Delta` touches `target`.
fn discriminant_excess(state: &TodaState, mu: f64, target: f64) -> (f64, f64) {
    let sigma = edge_sign(state, mu);
    let sg = Dd::from(sigma);
    let mut m: D2 = [[ONE, ZERO], [ZERO, ONE]];
    let mut dm: D2 = [[ZERO; 2]; 2];
    for k in 1..=state.len() as i64 {
        let ak = Dd::from(state.a_at(k));
        let am = Dd::from(state.a_at(k - 1));
        let x = sg * (Dd::from(mu) - Dd::from(state.b_at(k)));
        let c = (x - ak - am) / ak;
        let r = am / ak;
        let d = sg / ak;
        let t: D2 = [[ONE + c, r], [c, r]];
        let mut next = mul_dd(&t, &dm);
        for row in next.iter_mut() {
            row[0] = row[0] + d * m[0][0];
            row[1] = row[1] + d * m[0][1];
        }
        dm = next;
        m = mul_dd(&t, &m);
    }
    let s = Dd::from(sign_pow(sigma, state.len()));
    ((s * (m[0][0] + m[1][1]) - Dd::from(target)).to_f64(), (s * (dm[0][0] + dm[1][1])).to_f64())
}

/// Ends of gap `m` around its critical point `dot`, located with the
/// double-double discriminant; `None` if the gap is closed to that precision.
/// `left` and `right` are points outside the gap where `s Delta < 2`.
fn refine_gap(state: &TodaState, dot: f64, s: f64, left: f64, right: f64) -> Option<(f64, f64)> {
    let g = |x: f64| {
        let (v, d) = discriminant_excess(state, x, 2.0 * s);
        (s * v, s * d)
    };
    let top = g(dot).0;
    if top <= NOISE_FACTOR * discriminant_noise(state, dot) * f64::EPSILON {
        return None;
    }
    let outside = |dir: f64, bound: f64| {
        let mut r = 1e-14 * (1.0 + dot.abs());
        loop {
            let x = dot + dir * r;
            if (x - bound) * dir >= 0.0 {
                return (bound, g(bound).0);
            }
            let v = g(x).0;
            if v < 0.0 {
                return (x, v);
            }
            r *= 2.0;
        }
    };
    let (x0, g0) = outside(-1.0, left);
    let (x1, g1) = outside(1.0, right);
    if g0 >= 0.0 || g1 >= 0.0 {
        return None;
    }
    Some((bracketed_root(g, x0, dot, g0, top), bracketed_root(g, dot, x1, top, g1)))
}

/// A posteriori bound on the rounding error of [`discriminant`]'s value,
/// from the first-order perturbation of each factor of the monodromy product.
pub fn discriminant_noise(state: &TodaState, mu: f64) -> f64 {
    let n = state.len();
    let sigma = edge_sign(state, mu);
    // Rounding is componentwise relative, so the bound may be taken in the
    // coordinates (u, v / w) with w ~ sqrt|c| the local size of v / u, where
    // the steps are close to rotations instead of shears.
    let mean_c = (1..=n as i64).map(|k| step(state, k, mu, sigma).0[1][0]).sum::<f64>() / n as f64;
    let w = (mean_c.abs() + 1.0 / (n * n) as f64).sqrt().min(1.0);
    let ts: Vec<(M2, f64)> = (1..=n as i64)
        .map(|k| {
            let (t, _, c) = step(state, k, mu, sigma);
            ([[t[0][0], t[0][1] * w], [t[1][0] / w, t[1][1]]], c)
        })
        .collect();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(1.0f64);
    let mut p: M2 = [[1.0, 0.0], [0.0, 1.0]];
    for (t, _) in &ts {
        p = mul(t, &p);
        prefix.push(fro(&p));
    }
    let mut s: M2 = [[1.0, 0.0], [0.0, 1.0]];
    let mut acc = 0.0;
    for k in (0..n).rev() {
        acc += fro(&s) * (fro(&ts[k].0) + ts[k].1) * prefix[k];
        s = mul(&s, &ts[k].0);
    }
    4.0 * f64::EPSILON * acc
}

/// Where a real point sits relative to the periodic spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// Gap `n` lies between `lambda_{2n-1}` and `lambda_{2n}`; `0` is the half
    /// line below `lambda_0` and `N` the half line above `lambda_{2N-1}`.
    Gap(usize),
    /// Band `j` is `[lambda_{2j-2}, lambda_{2j-1}]`, `1 <= j <= N`.
    Band(usize),
}

/// The `2N` periodic eigenvalues of `Q_N` together with gap data.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumN {
    n: usize,
    lambda: Vec<f64>,
    gap_len: Vec<f64>,
    tau: Vec<f64>,
    dot_lambda: Vec<f64>,
    closed: Vec<bool>,
}

impl SpectrumN {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_even(&self) -> bool {
        self.n.is_multiple_of(2)
    }

    /// `lambda_0, ..., lambda_{2N-1}`.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn gap_lengths(&self) -> &[f64] {
        &self.gap_len
    }

    pub fn taus(&self) -> &[f64] {
        &self.tau
    }

    pub fn dot_lambdas(&self) -> &[f64] {
        &self.dot_lambda
    }

    /// `gamma_n` for `1 <= n < N`.
    pub fn gamma(&self, n: usize) -> f64 {
        self.gap_len[n - 1]
    }

    pub fn tau(&self, n: usize) -> f64 {
        self.tau[n - 1]
    }

    pub fn dot_lambda(&self, n: usize) -> f64 {
        self.dot_lambda[n - 1]
    }

    pub fn is_closed(&self, n: usize) -> bool {
        self.closed[n - 1]
    }

    /// `(lambda_{2n-1}, lambda_{2n})`.
    pub fn gap(&self, n: usize) -> (f64, f64) {
        (self.lambda[2 * n - 1], self.lambda[2 * n])
    }

    /// `(lambda_{2j-2}, lambda_{2j-1})`.
    pub fn band(&self, j: usize) -> (f64, f64) {
        (self.lambda[2 * j - 2], self.lambda[2 * j - 1])
    }

    pub fn width(&self) -> f64 {
        self.lambda[2 * self.n - 1] - self.lambda[0]
    }

    pub fn boundary_eps(&self) -> f64 {
        BOUNDARY_REL * self.width()
    }

    /// Sign of `Delta` on gap `n` (including the two exterior half lines).
    pub fn gap_sign(&self, n: usize) -> f64 {
        parity(self.n + n)
    }

    pub fn locate(&self, mu: f64) -> Location {
        let l = &self.lambda;
        if mu < l[0] {
            return Location::Gap(0);
        }
        // first index with lambda_i > mu
        let i = l.partition_point(|&x| x <= mu);
        if i >= l.len() {
            Location::Gap(self.n)
        } else if i % 2 == 1 {
            Location::Band(i.div_ceil(2))
        } else {
            Location::Gap(i / 2)
        }
    }

    /// Index and distance of the eigenvalue nearest to `mu`.
    fn nearest(&self, mu: f64) -> (usize, f64) {
        self.lambda
            .iter()
            .enumerate()
            .map(|(j, &l)| (j, (mu - l).abs()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty spectrum")
    }

    /// `1 / sqrt(prod |mu - lambda_j|)` over all eigenvalues except the two
    /// bounding gap `skip` (`skip = 0` keeps all of them). Accumulated in
    /// scaled form, so it is safe for any `N`.
    pub fn inv_sqrt_product(&self, mu: f64, skip: usize) -> f64 {
        let mut p = ScaledProduct::default();
        for (j, &l) in self.lambda.iter().enumerate() {
            if skip > 0 && (j == 2 * skip - 1 || j == 2 * skip) {
                continue;
            }
            p.mul((mu - l).abs());
        }
        (-0.5 * p.ln_abs()).exp()
    }
}

fn parity(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Periodic spectrum of `Q_N`: zeros of `Delta^2 - 4` located from the zeros of
/// `Delta'`, which are isolated first in Weyl balls around the equilibrium values.
pub fn eigenvalues_q(state: &TodaState) -> Result<SpectrumN> {
    let n = state.len();
    let nf = n as f64;
    let r = state.trace_p() / nf;
    let s = state.a().iter().sum::<f64>() / nf;
    let delta = (1..=n as i64)
        .map(|k| (state.b_at(k) - r).abs() + (state.a_at(k - 1) - s).abs() + (state.a_at(k) - s).abs())
        .fold(0.0f64, f64::max);
    let centres: Vec<f64> = (1..n).map(|m| r - 2.0 * s * (m as f64 * PI / nf).cos()).collect();
    let spacing = if n > 2 { centres[1] - centres[0] } else { s };
    let radius = delta + 1e-2 * spacing;
    let dots = clustered_zeros(|mu| discriminant(state, mu).1, &centres, radius)?;
    if dots.len() != n - 1 {
        return Err(Error::BracketFailure { n: 0, detail: format!("found {} zeros of Delta'", dots.len()) });
    }

    let lo = r - 2.0 * s - delta - spacing;
    let hi = r + 2.0 * s + delta + spacing;
    let mut ends = Vec::with_capacity(n + 1);
    ends.push(lo);
    ends.extend_from_slice(&dots);
    ends.push(hi);

    let gap_sign = |m: usize| parity(n + m);
    let mut closed = vec![false; n - 1];
    for m in 1..n {
        let mu = dots[m - 1];
        let e = gap_sign(m) * discriminant(state, mu).0 - 2.0;
        let noise = discriminant_noise(state, mu);
        if e < -NOISE_FACTOR * noise - 1e-8 {
            return Err(Error::BracketFailure {
                n: m,
                detail: format!("|Delta| = {} < 2 at the critical point {mu}", e + 2.0),
            });
        }
        closed[m - 1] = e <= NOISE_FACTOR * noise;
    }

    // root of Delta - 2 s on [x0, x1]
    let root = |x0: f64, x1: f64, target: f64, idx: usize| -> Result<f64> {
        let g = |x: f64| {
            let (d, dd) = discriminant(state, x);
            (d - target, dd)
        };
        let g0 = g(x0).0;
        let g1 = g(x1).0;
        if g0 * g1 > 0.0 {
            return Err(Error::BracketFailure {
                n: idx,
                detail: format!("Delta - {target} has no sign change on [{x0}, {x1}]"),
            });
        }
        Ok(bracketed_root(g, x0, x1, g0, g1))
    };

    let mut lambda = vec![0.0; 2 * n];
    lambda[0] = root(lo, ends[1], 2.0 * gap_sign(0), 0)?;
    for m in 1..n {
        if closed[m - 1] {
            lambda[2 * m - 1] = dots[m - 1];
            lambda[2 * m] = dots[m - 1];
        } else {
            let t = 2.0 * gap_sign(m);
            lambda[2 * m - 1] = root(ends[m - 1].max(lambda[2 * m - 2]), ends[m], t, 2 * m - 1)?;
            lambda[2 * m] = root(ends[m], ends[m + 1], t, 2 * m)?;
        }
    }
    lambda[2 * n - 1] = root(ends[n - 1], hi, 2.0, 2 * n - 1)?;

    // Pairs that double precision cannot split (a near-double root of
    // Delta -+ 2 only keeps half the digits) are redone in double-double.
    let rough = lambda[2 * n - 1] - lambda[0];
    let refined: Vec<(usize, Option<(f64, f64)>)> = (1..n)
        .into_par_iter()
        .filter(|&m| closed[m - 1] || lambda[2 * m] - lambda[2 * m - 1] < REFINE_REL * rough)
        .map(|m| (m, refine_gap(state, dots[m - 1], gap_sign(m), ends[m - 1], ends[m + 1])))
        .collect();
    for (m, pair) in refined {
        match pair {
            Some((l1, l2)) => {
                closed[m - 1] = false;
                lambda[2 * m - 1] = l1;
                lambda[2 * m] = l2;
            }
            None => {
                closed[m - 1] = true;
                lambda[2 * m - 1] = dots[m - 1];
                lambda[2 * m] = dots[m - 1];
            }
        }
    }

    let width = lambda[2 * n - 1] - lambda[0];
    let mut gap_len = Vec::with_capacity(n - 1);
    let mut tau = Vec::with_capacity(n - 1);
    let mut dot_lambda = dots;
    for m in 1..n {
        let (l1, l2) = (lambda[2 * m - 1], lambda[2 * m]);
        let t = 0.5 * (l1 + l2);
        let g = l2 - l1;
        if closed[m - 1] || g < DEGENERACY_REL * width {
            closed[m - 1] = true;
            lambda[2 * m - 1] = t;
            lambda[2 * m] = t;
            dot_lambda[m - 1] = t;
            gap_len.push(0.0);
        } else {
            gap_len.push(g);
        }
        tau.push(t);
    }
    Ok(SpectrumN { n, lambda, gap_len, tau, dot_lambda, closed })
}

/// The `N` eigenvalues of the periodic matrix `L(b, a)`: those `lambda_j` with
/// `Delta(lambda_j) = 2`.
pub fn eigenvalues_l(spectrum: &SpectrumN) -> Vec<f64> {
    let n = spectrum.n;
    (0..2 * n)
        .filter(|&i| {
            if i % 2 == 1 {
                (n + i.div_ceil(2)).is_multiple_of(2)
            } else {
                (n + i / 2 + 1) % 2 == 1
            }
        })
        .map(|i| spectrum.lambda[i])
        .collect()
}

/// Which side of the real axis a boundary value is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `mu - i0`
    Below,
    /// `mu + i0`
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseClass {
    PositiveReal,
    NegativeReal,
    PositiveImaginary,
    NegativeImaginary,
}

impl PhaseClass {
    fn real(sign: f64) -> Self {
        if sign > 0.0 {
            PhaseClass::PositiveReal
        } else {
            PhaseClass::NegativeReal
        }
    }

    fn imaginary(sign: f64) -> Self {
        if sign > 0.0 {
            PhaseClass::PositiveImaginary
        } else {
            PhaseClass::NegativeImaginary
        }
    }
}

/// A value of a canonical square root on the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CRootValue {
    pub magnitude: f64,
    pub phase: PhaseClass,
}

impl CRootValue {
    /// `(re, im)`
    pub fn value(&self) -> (f64, f64) {
        match self.phase {
            PhaseClass::PositiveReal => (self.magnitude, 0.0),
            PhaseClass::NegativeReal => (-self.magnitude, 0.0),
            PhaseClass::PositiveImaginary => (0.0, self.magnitude),
            PhaseClass::NegativeImaginary => (0.0, -self.magnitude),
        }
    }

    /// The square, which is real.
    pub fn square(&self) -> f64 {
        match self.phase {
            PhaseClass::PositiveReal | PhaseClass::NegativeReal => self.magnitude * self.magnitude,
            _ => -self.magnitude * self.magnitude,
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self.phase, PhaseClass::PositiveReal | PhaseClass::NegativeReal)
    }

    pub fn scaled(self, factor: f64) -> CRootValue {
        debug_assert!(factor > 0.0);
        CRootValue { magnitude: self.magnitude * factor, ..self }
    }
}

/// Phase of the canonical root at `mu`: on gap `n` at `mu - i0` the root is
/// real with sign `(-1)^{N+1-n}`, flipping across the cut; on band `j` it is
/// `i (-1)^{N+j}` times a positive number from either side.
pub fn canonical_phase(spectrum: &SpectrumN, mu: f64, side: Side) -> PhaseClass {
    let n = spectrum.n;
    match spectrum.locate(mu) {
        Location::Gap(k) => {
            let s = parity(n + 1 + k);
            PhaseClass::real(if side == Side::Below { s } else { -s })
        }
        Location::Band(j) => PhaseClass::imaginary(parity(n + j)),
    }
}

/// Canonical root of `Delta_N^2 - 4` at `mu -/+ i0`.
pub fn croot_delta_sq(state: &TodaState, spectrum: &SpectrumN, mu: f64, side: Side) -> Result<CRootValue> {
    let eps = spectrum.boundary_eps();
    let (j, d) = spectrum.nearest(mu);
    if d < eps {
        return Err(Error::OnSpectrumBoundary { mu, j, eps });
    }
    let delta = discriminant(state, mu).0;
    let magnitude = (delta * delta - 4.0).abs().sqrt();
    Ok(CRootValue { magnitude, phase: canonical_phase(spectrum, mu, side) })
}

/// Canonical root of `chi_N = q_N^2 (Delta_N^2 - 4)`.
pub fn croot_chi(state: &TodaState, spectrum: &SpectrumN, mu: f64, side: Side) -> Result<CRootValue> {
    Ok(croot_delta_sq(state, spectrum, mu, side)?.scaled(state.prod_q()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium_chebyshev() {
        let s = TodaState::equilibrium(7).unwrap();
        for &th in &[0.1, 0.7, 2.0, 3.0] {
            let mu = 2.0 * f64::cos(th);
            let (d, _) = discriminant(&s, mu);
            assert!((d - 2.0 * (7.0 * th).cos()).abs() < 1e-12);
        }
        let (d, dd) = discriminant(&s, 2.0);
        assert!((d - 2.0).abs() < 1e-13 && (dd - 49.0).abs() < 1e-10);
    }

    #[test]
    fn equilibrium_spectrum() {
        let s = TodaState::equilibrium(8).unwrap();
        let sp = eigenvalues_q(&s).unwrap();
        assert!((sp.lambda()[0] + 2.0).abs() < 1e-12);
        assert!((sp.lambda()[15] - 2.0).abs() < 1e-12);
        for m in 1..8 {
            let c = -2.0 * (m as f64 * PI / 8.0).cos();
            assert!(sp.is_closed(m));
            assert!((sp.tau(m) - c).abs() < 1e-12);
        }
        let l = eigenvalues_l(&sp);
        assert_eq!(l.len(), 8);
    }

    #[test]
    fn l_selection_n4() {
        let sp = eigenvalues_q(&TodaState::equilibrium(4).unwrap()).unwrap();
        let l = eigenvalues_l(&sp);
        let want = [-2.0, 0.0, 0.0, 2.0];
        for (x, y) in l.iter().zip(want) {
            assert!((x - y).abs() < 1e-12, "{l:?}");
        }
    }

    #[test]
    fn locate_and_phase() {
        let s = TodaState::new(vec![0.1, -0.05, 0.02, 0.0], vec![1.0, 0.9, 1.1, 1.05]).unwrap();
        let sp = eigenvalues_q(&s).unwrap();
        let top = sp.lambda()[7] + 0.5;
        // the sign condition is imposed at mu + i0 above the spectrum
        assert_eq!(croot_delta_sq(&s, &sp, top, Side::Above).unwrap().phase, PhaseClass::PositiveReal);
        assert_eq!(croot_delta_sq(&s, &sp, top, Side::Below).unwrap().phase, PhaseClass::NegativeReal);
        let (l1, l2) = sp.gap(1);
        assert!(l2 > l1);
        let mid = 0.5 * (l1 + l2);
        // N = 4, gap 1: (-1)^{N+1-n} = +1
        assert_eq!(croot_delta_sq(&s, &sp, mid, Side::Below).unwrap().phase, PhaseClass::PositiveReal);
        assert_eq!(croot_delta_sq(&s, &sp, mid, Side::Above).unwrap().phase, PhaseClass::NegativeReal);
        assert!(croot_delta_sq(&s, &sp, l1, Side::Below).is_err());
        for j in 1..=4 {
            let (a, b) = sp.band(j);
            assert_eq!(sp.locate(0.5 * (a + b)), Location::Band(j));
        }
    }

    #[test]
    fn trace_identity() {
        let s = TodaState::new(vec![0.3, -0.2, 0.1, 0.05, -0.4], vec![1.2, 0.8, 1.0, 0.7, 1.3]).unwrap();
        let sp = eigenvalues_q(&s).unwrap();
        let sum: f64 = sp.lambda().iter().sum();
        assert!((sum - 2.0 * s.trace_p()).abs() < 1e-11);
        let lsum: f64 = eigenvalues_l(&sp).iter().sum();
        assert!((lsum - s.trace_p()).abs() < 1e-12);
        for &l in sp.lambda() {
            let d = discriminant(&s, l).0;
            assert!((d * d - 4.0).abs() < 1e-9);
        }
    }
}
