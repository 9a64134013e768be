//! Toda chain states built from smooth periodic profiles, the reflection
//! symmetry, Lax matrices and a fixed-step integrator for the Lax flow.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hill_kdv::HillPotential;

/// Finite Fourier sum `f(x) = sum_k c_k cos(2 pi k x) + s_k sin(2 pi k x)`, `k >= 1`.
///
/// There is no constant term, so every profile has mean zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FourierProfile {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl FourierProfile {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a profile from coefficient slices indexed from `k = 1`.
    pub fn new(cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        if cos.iter().chain(sin.iter()).any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("Fourier coefficient"));
        }
        let len = cos.len().max(sin.len());
        let mut p = FourierProfile { cos, sin };
        p.cos.resize(len, 0.0);
        p.sin.resize(len, 0.0);
        p.trim();
        Ok(p)
    }

    /// Builds a profile from `(k, cos_coeff, sin_coeff)` triples; repeated `k` add up.
    pub fn from_terms(terms: &[(usize, f64, f64)]) -> Result<Self> {
        let len = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let mut cos = vec![0.0; len];
        let mut sin = vec![0.0; len];
        for &(k, c, s) in terms {
            if k == 0 {
                return Err(Error::Config("Fourier mode k = 0 is not allowed (profiles have mean zero)".into()));
            }
            cos[k - 1] += c;
            sin[k - 1] += s;
        }
        Self::new(cos, sin)
    }

    pub fn cos_mode(k: usize, c: f64) -> Self {
        Self::from_terms(&[(k, c, 0.0)]).expect("single finite mode")
    }

    pub fn sin_mode(k: usize, s: f64) -> Self {
        Self::from_terms(&[(k, 0.0, s)]).expect("single finite mode")
    }

    fn trim(&mut self) {
        while self.cos.last() == Some(&0.0) && self.sin.last() == Some(&0.0) {
            self.cos.pop();
            self.sin.pop();
        }
    }

    /// Highest harmonic present.
    pub fn degree(&self) -> usize {
        self.cos.len()
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    /// `(k, c_k, s_k)` for every nonzero harmonic.
    pub fn terms(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .filter(|(_, (c, s))| **c != 0.0 || **s != 0.0)
            .map(|(i, (c, s))| (i + 1, *c, *s))
    }

    pub fn is_zero(&self) -> bool {
        self.cos.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms()
            .map(|(k, c, s)| {
                let (sn, cs) = (2.0 * PI * k as f64 * x).sin_cos();
                c * cs + s * sn
            })
            .sum()
    }

    /// Evaluates at `x = num/den` reducing `k num mod den` exactly before taking the angle.
    pub fn eval_ratio(&self, num: i64, den: u64) -> f64 {
        let den_i = den as i128;
        self.terms()
            .map(|(k, c, s)| {
                let r = (k as i128 * num as i128).rem_euclid(den_i);
                let (sn, cs) = (2.0 * PI * r as f64 / den as f64).sin_cos();
                c * cs + s * sn
            })
            .sum()
    }

    pub fn derivative(&self) -> FourierProfile {
        let mut cos = vec![0.0; self.degree()];
        let mut sin = vec![0.0; self.degree()];
        for (k, c, s) in self.terms() {
            let w = 2.0 * PI * k as f64;
            cos[k - 1] = w * s;
            sin[k - 1] = -w * c;
        }
        FourierProfile::new(cos, sin).expect("finite")
    }

    /// Mean-zero antiderivative, computed termwise.
    pub fn antiderivative(&self) -> FourierProfile {
        let mut cos = vec![0.0; self.degree()];
        let mut sin = vec![0.0; self.degree()];
        for (k, c, s) in self.terms() {
            let w = 2.0 * PI * k as f64;
            sin[k - 1] = c / w;
            cos[k - 1] = -s / w;
        }
        FourierProfile::new(cos, sin).expect("finite")
    }

    /// `x -> f(-x)`.
    pub fn mirrored(&self) -> FourierProfile {
        FourierProfile {
            cos: self.cos.clone(),
            sin: self.sin.iter().map(|s| -s).collect(),
        }
    }

    /// `x -> f(m x)`.
    pub fn dilated(&self, m: usize) -> FourierProfile {
        assert!(m >= 1);
        let mut cos = vec![0.0; self.degree() * m];
        let mut sin = vec![0.0; self.degree() * m];
        for (k, c, s) in self.terms() {
            cos[k * m - 1] = c;
            sin[k * m - 1] = s;
        }
        FourierProfile::new(cos, sin).expect("finite")
    }

    pub fn scaled(&self, factor: f64) -> FourierProfile {
        FourierProfile::new(
            self.cos.iter().map(|c| c * factor).collect(),
            self.sin.iter().map(|s| s * factor).collect(),
        )
        .expect("finite")
    }

    pub fn add(&self, other: &FourierProfile) -> FourierProfile {
        let len = self.degree().max(other.degree());
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        FourierProfile::new(
            (0..len).map(|i| get(&self.cos, i) + get(&other.cos, i)).collect(),
            (0..len).map(|i| get(&self.sin, i) + get(&other.sin, i)).collect(),
        )
        .expect("finite")
    }

    /// Upper bound for `sup |f|`.
    pub fn sup_bound(&self) -> f64 {
        self.terms().map(|(_, c, s)| c.hypot(s)).sum()
    }
}

/// Flaschka variables `(b, a)` of an `N` particle periodic chain.
#[derive(Debug, Clone, PartialEq)]
pub struct TodaState {
    b: Vec<f64>,
    a: Vec<f64>,
    trace_p: f64,
    log_q: f64,
}

impl TodaState {
    pub fn new(b: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        let n = b.len();
        if n < 3 {
            return Err(Error::TooFewParticles(n));
        }
        if a.len() != n {
            return Err(Error::Config(format!("b has length {n} but a has length {}", a.len())));
        }
        if b.iter().chain(&a).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("Flaschka variable"));
        }
        if let Some((i, &v)) = a.iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(Error::NonPositiveA { n: i + 1, value: v });
        }
        let trace_p = b.iter().sum();
        let log_q = a.iter().map(|x| x.ln()).sum();
        Ok(TodaState { b, a, trace_p, log_q })
    }

    /// `b = 0`, `a = 1`.
    pub fn equilibrium(n: usize) -> Result<Self> {
        Self::scaled_equilibrium(n, 0.0, 1.0)
    }

    /// `b = r 1_N`, `a = s 1_N`.
    pub fn scaled_equilibrium(n: usize, r: f64, s: f64) -> Result<Self> {
        Self::new(vec![r; n], vec![s; n])
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// `b_n` with the 1-based, N-periodic index convention.
    pub fn b_at(&self, n: i64) -> f64 {
        self.b[(n - 1).rem_euclid(self.len() as i64) as usize]
    }

    pub fn a_at(&self, n: i64) -> f64 {
        self.a[(n - 1).rem_euclid(self.len() as i64) as usize]
    }

    /// Sum of the `b_n`.
    pub fn trace_p(&self) -> f64 {
        self.trace_p
    }

    /// Product of the `a_n`.
    pub fn prod_q(&self) -> f64 {
        self.log_q.exp()
    }

    pub fn log_q(&self) -> f64 {
        self.log_q
    }

    /// Reflected state `b~_n = -b_{N-n}`, `a~_n = a_{N-1-n}`.
    pub fn reflect(&self) -> TodaState {
        let n = self.len() as i64;
        let b = (1..=n).map(|k| -self.b_at(n - k)).collect();
        let a = (1..=n).map(|k| self.a_at(n - 1 - k)).collect();
        TodaState::new(b, a).expect("reflection preserves validity")
    }
}

/// `b_n = beta(n/N)/(4N^2)`, `a_n = 1 + alpha(n/N)/(4N^2)`.
pub fn discretize(alpha: &FourierProfile, beta: &FourierProfile, n: usize) -> Result<TodaState> {
    if n < 3 {
        return Err(Error::TooFewParticles(n));
    }
    let scale = 4.0 * (n as f64).powi(2);
    let b = (1..=n).map(|k| beta.eval_ratio(k as i64, n as u64) / scale).collect();
    let mut a = Vec::with_capacity(n);
    for k in 1..=n {
        let v = 1.0 + alpha.eval_ratio(k as i64, n as u64) / scale;
        if v <= 0.0 {
            return Err(Error::NonPositiveA { n: k, value: v });
        }
        a.push(v);
    }
    TodaState::new(b, a)
}

/// Alternative discretization through positions: `q_n = -(2/4N) xi(n/N)` with
/// `xi' = alpha` of mean zero, `a_n = exp((q_n - q_{n+1})/2)`, `b` as in [`discretize`].
pub fn discretize_pq(alpha: &FourierProfile, beta: &FourierProfile, n: usize) -> Result<TodaState> {
    let base = discretize(&FourierProfile::zero(), beta, n)?;
    let xi = alpha.antiderivative();
    let q = |k: usize| -(2.0 / (4.0 * n as f64)) * xi.eval_ratio(k as i64, n as u64);
    let a = (1..=n).map(|k| ((q(k) - q(k + 1)) / 2.0).exp()).collect();
    TodaState::new(base.b, a)
}

/// Period-1/2 edge potentials `q_-(x) = -2 alpha(2x) + beta(2x)` and
/// `q_+(x) = -2 alpha(2x) - beta(2x)`.
pub fn potentials(alpha: &FourierProfile, beta: &FourierProfile) -> (HillPotential, HillPotential) {
    let a2 = alpha.dilated(2).scaled(-2.0);
    let b2 = beta.dilated(2);
    let minus = HillPotential::new(a2.add(&b2)).expect("even harmonics only");
    let plus = HillPotential::new(a2.add(&b2.scaled(-1.0))).expect("even harmonics only");
    (minus, plus)
}

/// Profiles matching the reflected chain: `alpha~(x) = alpha(-x)`, `beta~(x) = -beta(-x)`.
pub fn reflect_profiles(alpha: &FourierProfile, beta: &FourierProfile) -> (FourierProfile, FourierProfile) {
    (alpha.mirrored(), beta.mirrored().scaled(-1.0))
}

/// Dense row-major `N x N` matrices `L(b, a)` and `B(a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaxPair {
    pub n: usize,
    pub l: Vec<f64>,
    pub b: Vec<f64>,
}

impl LaxPair {
    pub fn l_at(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }

    pub fn b_at(&self, i: usize, j: usize) -> f64 {
        self.b[i * self.n + j]
    }

    /// `[B, L] = BL - LB`.
    pub fn commutator(&self) -> Vec<f64> {
        let bl = matmul(self.n, &self.b, &self.l);
        let lb = matmul(self.n, &self.l, &self.b);
        bl.iter().zip(&lb).map(|(x, y)| x - y).collect()
    }
}

pub fn lax_matrices(state: &TodaState) -> LaxPair {
    let n = state.len();
    LaxPair { n, l: l_matrix(state.b(), state.a()), b: b_matrix(state.a()) }
}

fn l_matrix(b: &[f64], a: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        l[i * n + i] = b[i];
        let j = (i + 1) % n;
        l[i * n + j] += a[i];
        l[j * n + i] += a[i];
    }
    l
}

fn b_matrix(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        let j = (i + 1) % n;
        m[i * n + j] += a[i];
        m[j * n + i] -= a[i];
    }
    m
}

fn matmul(n: usize, x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let xik = x[i * n + k];
            if xik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += xik * y[k * n + j];
            }
        }
    }
    out
}

/// Samples of a Lax flow integration.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<TodaState>,
}

fn lax_rhs(l: &[f64], n: usize) -> Vec<f64> {
    let a: Vec<f64> = (0..n).map(|i| l[i * n + (i + 1) % n]).collect();
    let b = b_matrix(&a);
    let bl = matmul(n, &b, l);
    let lb = matmul(n, l, &b);
    bl.iter().zip(&lb).map(|(x, y)| x - y).collect()
}

/// Integrates `dL/dt = BL - LB` with the classical fourth order Runge-Kutta method.
///
/// After every step `L` is symmetrized and `(b, a)` re-extracted. A sample is
/// recorded every `sample_every` steps and at `t_final`.
pub fn evolve_lax(state: &TodaState, t_final: f64, dt: f64, sample_every: usize) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t_final >= 0.0) || !dt.is_finite() || !t_final.is_finite() {
        return Err(Error::InvalidStep { dt, t_final });
    }
    let n = state.len();
    let steps = (t_final / dt).round() as usize;
    let h = if steps == 0 { 0.0 } else { t_final / steps as f64 };
    let every = sample_every.max(1);
    let mut traj = Trajectory { times: vec![0.0], states: vec![state.clone()] };
    let mut l = l_matrix(state.b(), state.a());
    let axpy = |x: &[f64], k: &[f64], c: f64| -> Vec<f64> { x.iter().zip(k).map(|(x, k)| x + c * k).collect() };
    for step in 1..=steps {
        let k1 = lax_rhs(&l, n);
        let k2 = lax_rhs(&axpy(&l, &k1, h / 2.0), n);
        let k3 = lax_rhs(&axpy(&l, &k2, h / 2.0), n);
        let k4 = lax_rhs(&axpy(&l, &k3, h), n);
        for i in 0..l.len() {
            l[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t = step as f64 * h;
        let b: Vec<f64> = (0..n).map(|i| l[i * n + i]).collect();
        let a: Vec<f64> = (0..n)
            .map(|i| {
                let j = (i + 1) % n;
                0.5 * (l[i * n + j] + l[j * n + i])
            })
            .collect();
        if let Some((i, &v)) = a.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::StepRejected { t, n: i + 1, value: v });
        }
        l = l_matrix(&b, &a);
        if step % every == 0 || step == steps {
            traj.times.push(t);
            traj.states.push(TodaState::new(b, a)?);
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium_discretization() {
        let s = discretize(&FourierProfile::zero(), &FourierProfile::zero(), 8).unwrap();
        assert!(s.b().iter().all(|&x| x == 0.0));
        assert!(s.a().iter().all(|&x| x == 1.0));
        assert_eq!(s.trace_p(), 0.0);
        assert_eq!(s.prod_q(), 1.0);
    }

    #[test]
    fn cosine_alpha_n4() {
        let s = discretize(&FourierProfile::cos_mode(1, 1.0), &FourierProfile::zero(), 4).unwrap();
        let want = [1.0, 1.0 - 1.0 / 64.0, 1.0, 1.0 + 1.0 / 64.0];
        for (x, w) in s.a().iter().zip(want) {
            assert!((x - w).abs() < 1e-15, "{x} vs {w}");
        }
    }

    #[test]
    fn too_large_profile_is_rejected() {
        let err = discretize(&FourierProfile::cos_mode(1, -100.0), &FourierProfile::zero(), 3).unwrap_err();
        assert!(matches!(err, Error::NonPositiveA { .. }));
    }

    #[test]
    fn pq_discretization_matches_at_equilibrium() {
        let z = FourierProfile::zero();
        assert_eq!(discretize(&z, &z, 7).unwrap(), discretize_pq(&z, &z, 7).unwrap());
    }

    #[test]
    fn antiderivative_of_sin4pix() {
        let xi = FourierProfile::sin_mode(2, 1.0).antiderivative();
        for x in [0.0, 0.1, 0.37] {
            assert!((xi.eval(x) + (4.0 * PI * x).cos() / (4.0 * PI)).abs() < 1e-15);
        }
    }

    #[test]
    fn reflection_is_an_involution() {
        let s = TodaState::new(vec![0.1, -0.2, 0.3, 0.05], vec![1.1, 0.9, 1.2, 0.8]).unwrap();
        let r = s.reflect();
        assert_eq!(r.reflect(), s);
        assert!((r.trace_p() + s.trace_p()).abs() < 1e-15);
        assert!((r.log_q() - s.log_q()).abs() < 1e-15);
        // b~_1 = -b_{N-1}, a~_1 = a_{N-2}
        assert_eq!(r.b()[0], -s.b()[2]);
        assert_eq!(r.a()[0], s.a()[1]);
    }

    #[test]
    fn potentials_of_simple_profiles() {
        let (qm, qp) = potentials(&FourierProfile::cos_mode(1, 1.0), &FourierProfile::zero());
        for x in [0.0, 0.13, 0.4] {
            let want = -2.0 * (4.0 * PI * x).cos();
            assert!((qm.eval(x) - want).abs() < 1e-14);
            assert!((qp.eval(x) - want).abs() < 1e-14);
        }
        let (qm, qp) = potentials(&FourierProfile::zero(), &FourierProfile::sin_mode(1, 1.0));
        assert!((qm.eval(0.1) - (0.4 * PI).sin()).abs() < 1e-14);
        assert!((qp.eval(0.1) + (0.4 * PI).sin()).abs() < 1e-14);
    }

    #[test]
    fn lax_structure() {
        let s = TodaState::new(vec![0.1, -0.2, 0.3, 0.05, 0.0], vec![1.1, 0.9, 1.2, 0.8, 1.0]).unwrap();
        let lp = lax_matrices(&s);
        let n = lp.n;
        for i in 0..n {
            for j in 0..n {
                assert_eq!(lp.l_at(i, j), lp.l_at(j, i));
                assert_eq!(lp.b_at(i, j), -lp.b_at(j, i));
            }
        }
        assert_eq!(lp.b_at(0, n - 1), -s.a()[n - 1]);
        assert_eq!(lp.b_at(n - 1, 0), s.a()[n - 1]);
        let c = lp.commutator();
        let diag: f64 = (0..n).map(|i| c[i * n + i]).sum();
        assert!(diag.abs() < 1e-14);
        for i in 0..n {
            for j in 0..n {
                assert!((c[i * n + j] - c[j * n + i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn equilibrium_is_a_fixed_point_of_the_flow() {
        let s = TodaState::equilibrium(6).unwrap();
        assert!(lax_matrices(&s).commutator().iter().all(|x| x.abs() < 1e-14));
        let traj = evolve_lax(&s, 1.0, 1e-2, 10).unwrap();
        let last = traj.states.last().unwrap();
        for (x, y) in last.a().iter().zip(s.a()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
