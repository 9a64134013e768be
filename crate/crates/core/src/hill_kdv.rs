//! Hill operators `-y'' + q y` with period-1/2 potentials: discriminant,
//! periodic spectrum, KdV actions, normalized differentials and frequencies.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, RwLock};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_gk, arccos_clamped, arcosh, theta_doubling, theta_doubling_vec, Node, MAX_NODES, QUAD_TOL};
use crate::roots::{bracketed_root, clustered_zeros};
use crate::toda_model::FourierProfile;

/// Gaps shorter than this are treated as closed.
pub const HILL_DEGENERACY_EPS: f64 = 1e-9;
/// Critical values with `|Delta| - 2` below this are treated as closed gaps;
/// it sits about one decade above the integrator accuracy.
const HILL_EXCESS_EPS: f64 = 1e-10;
const N_BASE: usize = 256;
const PROBE_TOL: f64 = 1e-11;
const ARCOSH_SLACK: f64 = 1e-10;
/// Absolute floor (per unit gap length) for the action quadrature: near a
/// band edge arcosh turns discriminant noise of size `e` into `sqrt(2 e)`.
const ACTION_ABS_TOL: f64 = 1e-9;

/// A real trigonometric potential of period 1/2 (only even harmonics of the
/// unit period present).
#[derive(Debug, Clone, PartialEq)]
pub struct HillPotential(FourierProfile);

impl HillPotential {
    pub fn new(profile: FourierProfile) -> Result<Self> {
        let odd = profile.terms().any(|(k, c, s)| k % 2 == 1 && (c != 0.0 || s != 0.0));
        if odd {
            return Err(Error::Config("Hill potential must have period 1/2 (even harmonics only)".into()));
        }
        Ok(HillPotential(profile))
    }

    pub fn zero() -> Self {
        HillPotential(FourierProfile::zero())
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.eval(x)
    }

    pub fn profile(&self) -> &FourierProfile {
        &self.0
    }

    pub fn sup_bound(&self) -> f64 {
        self.0.sup_bound()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `x -> q(-x)`
    pub fn mirrored(&self) -> HillPotential {
        HillPotential(self.0.mirrored())
    }
}

/// Fundamental-system integrator for a fixed potential. Caches potential
/// samples per step count; safe to share between threads.
pub struct HillOperator {
    q: HillPotential,
    n_base: usize,
    samples: RwLock<HashMap<usize, Arc<Vec<f64>>>>,
}

impl fmt::Debug for HillOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HillOperator").field("q", &self.q).field("n_base", &self.n_base).finish()
    }
}

/// Output of one integration over the half period.
#[derive(Debug, Clone, Copy)]
pub struct Monodromy {
    pub delta: f64,
    pub delta_dot: f64,
    pub wronskian: f64,
}

impl HillOperator {
    /// Calibrates the step count at `probe` (a large spectral parameter of interest).
    pub fn new(q: HillPotential, probe: f64) -> Self {
        let mut op = HillOperator { q, n_base: N_BASE, samples: RwLock::new(HashMap::new()) };
        // compare the whole fundamental matrix, scaled to unit size, so a probe
        // that happens to sit where Delta is stationary cannot hide phase error
        let w = probe.abs().sqrt().max(1.0);
        let scale = [1.0, 1.0 / w, w, 1.0];
        while op.n_base < 1 << 14 {
            let a = op.integrate_state(probe, op.steps(probe, op.n_base));
            let b = op.integrate_state(probe, op.steps(probe, 2 * op.n_base));
            let diff = (0..4).map(|i| (a[i] - b[i]).abs() * scale[i]).fold(0.0, f64::max);
            if diff < PROBE_TOL {
                break;
            }
            op.n_base *= 2;
        }
        op.samples.write().expect("cache lock").clear();
        op
    }

    /// Operator calibrated for the first `k` gaps.
    pub fn for_gaps(q: HillPotential, k: usize) -> Self {
        let probe = 4.0 * PI * PI * ((k + 1) as f64).powi(2);
        Self::new(q, probe)
    }

    pub fn potential(&self) -> &HillPotential {
        &self.q
    }

    pub fn n_base(&self) -> usize {
        self.n_base
    }

    fn steps(&self, lam: f64, n_base: usize) -> usize {
        let s = (n_base as f64 * (1.0 + lam.abs().sqrt() / PI)).ceil() as usize;
        // round up onto a ladder with 8 rungs per octave so samples can be reused
        let p = 1usize << (usize::BITS - s.leading_zeros()).saturating_sub(4);
        s.div_ceil(p) * p
    }

    fn samples(&self, steps: usize) -> Arc<Vec<f64>> {
        if let Some(v) = self.samples.read().expect("cache lock").get(&steps) {
            return v.clone();
        }
        let h = 0.5 / steps as f64;
        let v: Arc<Vec<f64>> = Arc::new((0..=2 * steps).map(|i| self.q.eval(0.5 * h * i as f64)).collect());
        self.samples.write().expect("cache lock").insert(steps, v.clone());
        v
    }

    fn integrate(&self, lam: f64, steps: usize) -> Monodromy {
        let u = self.integrate_state(lam, steps);
        Monodromy { delta: u[0] + u[3], delta_dot: u[4] + u[7], wronskian: u[0] * u[3] - u[1] * u[2] }
    }

    /// `[y1, y1', y2, y2', d y1, d y1', d y2, d y2']` at `x = 1/2`, `d = d/dlam`.
    fn integrate_state(&self, lam: f64, steps: usize) -> [f64; 8] {
        let qs = self.samples(steps);
        let h = 0.5 / steps as f64;
        let rhs = |qx: f64, u: &[f64; 8]| -> [f64; 8] {
            let c = qx - lam;
            [u[1], c * u[0], u[3], c * u[2], u[5], c * u[4] - u[0], u[7], c * u[6] - u[2]]
        };
        let mut u = [1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        for i in 0..steps {
            let (q0, q1, q2) = (qs[2 * i], qs[2 * i + 1], qs[2 * i + 2]);
            let k1 = rhs(q0, &u);
            let k2 = rhs(q1, &axpy(&u, 0.5 * h, &k1));
            let k3 = rhs(q1, &axpy(&u, 0.5 * h, &k2));
            let k4 = rhs(q2, &axpy(&u, h, &k3));
            for j in 0..8 {
                u[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
        }
        u
    }

    /// Discriminant, its derivative and the Wronskian at `x = 1/2`.
    pub fn monodromy(&self, lam: f64) -> Monodromy {
        self.integrate(lam, self.steps(lam, self.n_base))
    }

    /// `(Delta(lam), dDelta/dlam)`.
    pub fn discriminant(&self, lam: f64) -> (f64, f64) {
        let m = self.monodromy(lam);
        (m.delta, m.delta_dot)
    }
}

fn axpy(u: &[f64; 8], a: f64, k: &[f64; 8]) -> [f64; 8] {
    let mut out = *u;
    for j in 0..8 {
        out[j] += a * k[j];
    }
    out
}

/// `(Delta(lam), Delta'(lam))` for a one-off evaluation.
pub fn hill_discriminant(q: &HillPotential, lam: f64) -> (f64, f64) {
    HillOperator::new(q.clone(), lam.abs().max(4.0 * PI * PI * 16.0)).discriminant(lam)
}

fn parity(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// First `2K + 1` periodic eigenvalues of a Hill operator.
#[derive(Debug, Clone)]
pub struct HillSpectrum {
    k: usize,
    lambda: Vec<f64>,
    gap_len: Vec<f64>,
    tau: Vec<f64>,
    dot_lambda: Vec<f64>,
    closed: Vec<bool>,
    op: Arc<HillOperator>,
}

impl HillSpectrum {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn gap_lengths(&self) -> &[f64] {
        &self.gap_len
    }

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

    pub fn gap(&self, n: usize) -> (f64, f64) {
        (self.lambda[2 * n - 1], self.lambda[2 * n])
    }

    pub fn band(&self, j: usize) -> (f64, f64) {
        (self.lambda[2 * j - 2], self.lambda[2 * j - 1])
    }

    pub fn operator(&self) -> &Arc<HillOperator> {
        &self.op
    }

    pub fn discriminant(&self, lam: f64) -> (f64, f64) {
        self.op.discriminant(lam)
    }

    /// Open gaps among the first `K`.
    pub fn open_gaps(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.k).filter(|&n| !self.closed[n - 1])
    }
}

/// Periodic spectrum up to gap `k`, with the operator calibrated accordingly.
pub fn hill_eigenvalues(q: &HillPotential, k: usize) -> Result<HillSpectrum> {
    hill_eigenvalues_with(Arc::new(HillOperator::for_gaps(q.clone(), k)), k)
}

/// Periodic spectrum up to gap `k` for a prepared operator. The zeros of
/// `Delta'` are isolated within `sup|q|` of `4 pi^2 n^2` first; each gap
/// is then either closed or bracketed by neighbouring critical points.
pub fn hill_eigenvalues_with(op: Arc<HillOperator>, k: usize) -> Result<HillSpectrum> {
    if k == 0 {
        return Err(Error::Config("need at least one gap".into()));
    }
    let bound = op.potential().sup_bound();
    let radius = bound + 1.0;
    if 2.0 * radius >= 4.0 * PI * PI * (2 * k + 3) as f64 {
        return Err(Error::Config(format!("potential too large (sup {bound}) to isolate {k} gaps")));
    }
    let centres: Vec<f64> = (1..=k + 1).map(|n| 4.0 * PI * PI * (n * n) as f64).collect();
    let dots = clustered_zeros(|l| op.discriminant(l).1, &centres, radius)?;
    let lo = -bound - 1.0;

    let root = |x0: f64, x1: f64, target: f64, idx: usize| -> Result<f64> {
        let g = |x: f64| {
            let (d, dd) = op.discriminant(x);
            (d - target, dd)
        };
        let (g0, g1) = (g(x0).0, g(x1).0);
        if g0 * g1 > 0.0 {
            return Err(Error::BracketFailure {
                n: idx,
                detail: format!("Delta - {target} has no sign change on [{x0}, {x1}]"),
            });
        }
        Ok(bracketed_root(g, x0, x1, g0, g1))
    };

    let mut lambda = vec![0.0; 2 * k + 1];
    lambda[0] = root(lo, dots[0], 2.0, 0)?;
    let mut closed = vec![false; k];
    let mut gap_len = Vec::with_capacity(k);
    let mut tau = Vec::with_capacity(k);
    let mut dot_lambda = Vec::with_capacity(k);
    for n in 1..=k {
        let s = parity(n);
        let d = dots[n - 1];
        let excess = s * op.discriminant(d).0 - 2.0;
        let prev = if n == 1 { lambda[0] } else { dots[n - 2].max(lambda[2 * n - 2]) };
        let (l1, l2) = if excess <= HILL_EXCESS_EPS {
            (d, d)
        } else {
            (root(prev, d, 2.0 * s, 2 * n - 1)?, root(d, dots[n], 2.0 * s, 2 * n)?)
        };
        let t = 0.5 * (l1 + l2);
        if l2 - l1 < HILL_DEGENERACY_EPS {
            closed[n - 1] = true;
            lambda[2 * n - 1] = t;
            lambda[2 * n] = t;
            gap_len.push(0.0);
            dot_lambda.push(t);
        } else {
            lambda[2 * n - 1] = l1;
            lambda[2 * n] = l2;
            gap_len.push(l2 - l1);
            dot_lambda.push(d);
        }
        tau.push(t);
    }
    Ok(HillSpectrum { k, lambda, gap_len, tau, dot_lambda, closed, op })
}

/// KdV actions and their gap quotients for the first `K` gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct KdvActions {
    /// `I_n = (2/pi) int_gap arcosh((-1)^n Delta / 2)`
    pub i: Vec<f64>,
    /// `J_n = I_n / (2 gamma_n)`, matching the limit of the Toda quotients; 0 on closed gaps
    pub j: Vec<f64>,
}

pub fn kdv_actions(spectrum: &HillSpectrum) -> Result<KdvActions> {
    let k = spectrum.k;
    let mut i = vec![0.0; k];
    let mut j = vec![0.0; k];
    for n in spectrum.open_gaps() {
        let (lo, hi) = spectrum.gap(n);
        let s = parity(n);
        let v = theta_doubling(
            |t| {
                let node = Node::on(lo, hi, t);
                let x = 0.5 * s * spectrum.discriminant(node.x).0;
                if x < 1.0 - ARCOSH_SLACK {
                    return Err(Error::NegativeArcoshArgument { n, value: x });
                }
                Ok(arcosh(x) * node.weight(lo, hi))
            },
            16,
            QUAD_TOL,
            ACTION_ABS_TOL * (hi - lo),
            MAX_NODES,
        )?;
        i[n - 1] = 2.0 / PI * v;
        j[n - 1] = i[n - 1] / (2.0 * spectrum.gamma(n));
    }
    Ok(KdvActions { i, j })
}

/// Zeros of the entire factor of the normalized differential `psi_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct KdvDifferential {
    pub n: usize,
    /// `sigma_l` for `l = 1..=K`; the entry `l = n` is unused and holds `tau_n`.
    sigma: Vec<f64>,
    /// `(1/pi) int_{gap n} psi_n / sqrt(Delta^2 - 4)`, signed so that 1 is exact.
    pub normalization: f64,
    /// Largest cycle-condition residual at exit.
    pub residual: f64,
    pub iterations: usize,
}

impl KdvDifferential {
    pub fn sigma(&self, l: usize) -> Option<f64> {
        (l != self.n && l >= 1 && l <= self.sigma.len()).then(|| self.sigma[l - 1])
    }

    pub fn k(&self) -> usize {
        self.sigma.len()
    }

    /// `psi_n(lam) / |sqrt(Delta(lam)^2 - 4)|` away from the spectrum ends,
    /// with the factors at the eigenvalues in `skip` left out.
    fn quotient(&self, spectrum: &HillSpectrum, lam: Lam, skip: &[usize]) -> f64 {
        quotient_form(spectrum, &self.sigma, self.n, lam, skip, 0)
    }
}

/// A point together with accurate distances to the ends of the interval it was sampled on.
#[derive(Clone, Copy)]
struct Lam {
    node: Node,
    lo: f64,
    hi: f64,
}

impl Lam {
    fn minus(&self, p: f64) -> f64 {
        self.node.minus(p, self.lo, self.hi)
    }
}

/// `2 pi n prod_{l != n} (sigma_l - lam) / prod_i |lam - lambda_i|^{1/2}` over the
/// resolved eigenvalues, skipping the indices in `skip` and the zero `sigma_omit`.
fn quotient_form(spectrum: &HillSpectrum, sigma: &[f64], n: usize, lam: Lam, skip: &[usize], omit: usize) -> f64 {
    let mut num = 2.0 * PI * n as f64;
    for (l, &s) in sigma.iter().enumerate() {
        if l + 1 != n && l + 1 != omit {
            num *= -lam.minus(s);
        }
    }
    let mut den = 1.0;
    for (i, &li) in spectrum.lambda.iter().enumerate() {
        if !skip.contains(&i) {
            den *= lam.minus(li).abs();
        }
    }
    num / den.sqrt()
}

const NEWTON_MAX: usize = 60;

/// Solves the vanishing cycle conditions of `psi_n` on the open gaps up to
/// `k_sigma`; the remaining resolved gaps keep `sigma_l = tau_l`.
pub fn kdv_psi(spectrum: &HillSpectrum, n: usize, k_sigma: usize) -> Result<KdvDifferential> {
    let k = spectrum.k;
    if n == 0 || n > k_sigma || k_sigma > k {
        return Err(Error::IndexOutOfRange { index: n, max: k_sigma.min(k) });
    }
    let mut sigma = spectrum.tau.clone();
    let unknowns: Vec<usize> = spectrum.open_gaps().filter(|&l| l != n && l <= k_sigma).collect();
    let m = unknowns.len();
    let mut residual = 0.0;
    let mut iterations = 0;
    if m > 0 {
        let scale = spectrum.gap_len.iter().fold(0.0f64, |a, &b| a.max(b));
        loop {
            let mut f = DVector::zeros(m);
            let mut jac = DMatrix::zeros(m, m);
            for (r, &g) in unknowns.iter().enumerate() {
                let (lo, hi) = spectrum.gap(g);
                let skip = [2 * g - 1, 2 * g];
                // [m0, m1, d/dsigma_u for u in unknowns]
                let mut out = vec![0.0; 2 + m];
                let sig = sigma.clone();
                theta_doubling_vec(
                    2 + m,
                    |t, v| {
                        let lam = Lam { node: Node::on(lo, hi, t), lo, hi };
                        // cycle condition is int (sigma_g - lam) h; h omits that factor
                        let h = quotient_form(spectrum, &sig, n, lam, &skip, g);
                        v[0] = h;
                        v[1] = lam.node.x * h;
                        let lin = -lam.minus(sig[g - 1]);
                        for (c, &u) in unknowns.iter().enumerate() {
                            v[2 + c] = if u == g { h } else { lin * h / -lam.minus(sig[u - 1]) };
                        }
                        Ok(())
                    },
                    16,
                    QUAD_TOL,
                    0.0,
                    MAX_NODES,
                    &mut out,
                )?;
                f[r] = (sigma[g - 1] * out[0] - out[1]) / PI;
                for c in 0..m {
                    jac[(r, c)] = out[2 + c] / PI;
                }
            }
            residual = (0..m).map(|r| f[r].abs() / jac[(r, r)].abs()).fold(0.0, f64::max);
            let step = jac.clone().lu().solve(&f).ok_or(Error::NewtonDivergence { n, iterations })?;
            let mut moved = 0.0f64;
            for (c, &g) in unknowns.iter().enumerate() {
                let (lo, hi) = spectrum.gap(g);
                let new = (sigma[g - 1] - step[c]).clamp(lo, hi);
                moved = moved.max((new - sigma[g - 1]).abs());
                sigma[g - 1] = new;
            }
            iterations += 1;
            if moved <= 1e-14 * (1.0 + scale) * 4.0 || residual < 1e-15 {
                break;
            }
            if iterations >= NEWTON_MAX || !moved.is_finite() {
                return Err(Error::NewtonDivergence { n, iterations });
            }
        }
    }

    let mut d = KdvDifferential { n, sigma, normalization: 0.0, residual, iterations };
    d.normalization = psi_normalization(spectrum, &d)?;
    Ok(d)
}

/// `(1/pi) int_{gap n} psi_n / |sqrt(Delta^2 - 4)|` times the sign of `psi_n`
/// there, or the point value on a closed gap.
fn psi_normalization(spectrum: &HillSpectrum, d: &KdvDifferential) -> Result<f64> {
    let n = d.n;
    let (lo, hi) = spectrum.gap(n);
    let skip = [2 * n - 1, 2 * n];
    let sign = parity(n - 1);
    if spectrum.is_closed(n) {
        let lam = Lam { node: Node::on(lo, hi.max(lo), PI / 2.0), lo, hi };
        return Ok(sign * d.quotient(spectrum, lam, &skip));
    }
    let v = theta_doubling(
        |t| Ok(d.quotient(spectrum, Lam { node: Node::on(lo, hi, t), lo, hi }, &skip)),
        16,
        QUAD_TOL,
        0.0,
        MAX_NODES,
    )?;
    Ok(sign * v / PI)
}

/// `W_n = sum_{j <= n} int_{band j} lam Delta' / (i sqrt(Delta^2 - 4))`,
/// integrated by parts into `-pi lambda_{2j-2} - int arccos((-1)^j Delta / 2)`.
pub fn kdv_first_kind(spectrum: &HillSpectrum, n: usize) -> Result<f64> {
    let mut w = 0.0;
    for j in 1..=n {
        let (lo, hi) = spectrum.band(j);
        let s = parity(j);
        let h = 0.5 * (hi - lo);
        let int = adaptive_gk(
            |t| {
                let node = Node::on(lo, hi, t);
                Ok(arccos_clamped(0.5 * s * spectrum.discriminant(node.x).0) * h * t.sin())
            },
            0.0,
            PI,
            1e-12,
            1e-13 * (1.0 + hi.abs()),
        )?;
        w += -PI * lo - int;
    }
    Ok(w)
}

/// `sum_{j <= n} int_{band j} psi_k / (i sqrt(Delta^2 - 4))`; on band `j`
/// the canonical root is `i (-1)^j` times a positive number.
pub fn kdv_second_kind(spectrum: &HillSpectrum, psi: &KdvDifferential, n: usize) -> Result<f64> {
    let mut acc = 0.0;
    for j in 1..=n {
        let (lo, hi) = spectrum.band(j);
        let skip = [2 * j - 2, 2 * j - 1];
        let v = adaptive_gk(
            |t| Ok(psi.quotient(spectrum, Lam { node: Node::on(lo, hi, t), lo, hi }, &skip)),
            0.0,
            PI,
            1e-11,
            1e-14,
        )?;
        acc += parity(j + 1) * v;
    }
    Ok(acc)
}

/// KdV frequencies `omega_n`, `n <= n_max`:
/// `-48 W_n + 24 sum_k I_k sum_{j <= n} int_{band j} psi_k / (i sqrt(Delta^2 - 4))`
/// with `k` over the open gaps that carry a solved differential.
pub fn kdv_frequencies(spectrum: &HillSpectrum, actions: &KdvActions, psis: &[KdvDifferential], n_max: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut w = -48.0 * kdv_first_kind(spectrum, n)?;
        for psi in psis {
            let ik = actions.i[psi.n - 1];
            if ik != 0.0 {
                w += 24.0 * ik * kdv_second_kind(spectrum, psi, n)?;
            }
        }
        out.push(w);
    }
    Ok(out)
}

/// Frequencies of the KdV-hierarchy Hamiltonian matched to the Toda edge:
/// `2 pi n / N - omega / (24 (2N)^3)`.
pub fn hkdv_reference(n_particles: usize, n: usize, omega_kdv: f64) -> f64 {
    let nn = n_particles as f64;
    2.0 * PI * n as f64 / nn - omega_kdv / (24.0 * (2.0 * nn).powi(3))
}

/// Defaults for resolved gaps, solved differentials and reported frequencies.
pub const DEFAULT_K: usize = 16;
pub const DEFAULT_K_SIGMA: usize = 16;
pub const DEFAULT_N_MAX: usize = 8;

/// Everything the harness needs from one edge potential.
#[derive(Debug, Clone)]
pub struct KdvData {
    pub spectrum: HillSpectrum,
    pub actions: KdvActions,
    /// Differentials for the open gaps up to `K_sigma`
    pub psis: Vec<KdvDifferential>,
    pub frequencies: Vec<f64>,
}

impl KdvData {
    pub fn compute(q: &HillPotential, k: usize, k_sigma: usize, n_max: usize) -> Result<KdvData> {
        let k = k.max(n_max).max(k_sigma);
        let spectrum = hill_eigenvalues(q, k)?;
        let actions = kdv_actions(&spectrum)?;
        let psis = spectrum
            .open_gaps()
            .filter(|&g| g <= k_sigma)
            .map(|g| kdv_psi(&spectrum, g, k_sigma))
            .collect::<Result<Vec<_>>>()?;
        let frequencies = kdv_frequencies(&spectrum, &actions, &psis, n_max)?;
        Ok(KdvData { spectrum, actions, psis, frequencies })
    }

    pub fn psi(&self, n: usize) -> Option<&KdvDifferential> {
        self.psis.iter().find(|p| p.n == n)
    }
}
