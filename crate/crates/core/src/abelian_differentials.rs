//! Normalized differentials on the Toda spectral curve: period matrix over the
//! gap cycles, the Chebyshev coefficients of `psi_n`, the frequencies and the
//! zeros of `phi_n`, plus the band-integral system for the frequencies.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jacobi_spectral::{discriminant, discriminant_noise, SpectrumN};
use crate::quadrature::{adaptive_gk, theta_doubling, theta_doubling_vec, Node, MAX_NODES, QUAD_TOL};
use crate::roots::{brent, ScaledProduct};
use crate::toda_actions::ActionSet;
use crate::toda_model::TodaState;

/// Condition estimates above this are reported as singular.
const MAX_COND: f64 = 1e14;

fn parity(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `T_0(x), ..., T_{m-1}(x)`.
fn chebyshev_values(x: f64, out: &mut [f64]) {
    let m = out.len();
    if m == 0 {
        return;
    }
    out[0] = 1.0;
    if m > 1 {
        out[1] = x;
    }
    for j in 2..m {
        out[j] = 2.0 * x * out[j - 1] - out[j - 2];
    }
}

/// `sum_j c_j T_j(x)` by Clenshaw's recurrence.
fn clenshaw(c: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &cj in c.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + cj;
        b2 = b1;
        b1 = b0;
    }
    x * b1 - b2 + c.first().copied().unwrap_or(0.0)
}

/// `sqrt(prod |mu - lambda_j|)` over the eigenvalues outside gap `k`, i.e.
/// `|sqrt(chi)|` with the two factors of gap `k` removed.
pub fn reduced_root(spectrum: &SpectrumN, mu: f64, k: usize) -> f64 {
    1.0 / spectrum.inv_sqrt_product(mu, k)
}

/// `(1/pi) int_gap f(mu) / sqrt(chi(mu - i0)) dmu` over open gap `k`, after the
/// substitution `mu = tau_k - (gamma_k / 2) cos(theta)`; the two factors of
/// `chi` that vanish on the gap turn into the quadrature weight and the rest
/// is evaluated as a product over the eigenvalues.
pub fn gap_cycle_integral<F>(spectrum: &SpectrumN, k: usize, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if spectrum.is_closed(k) {
        return Err(Error::ClosedGap(k));
    }
    let (lo, hi) = spectrum.gap(k);
    let sign = parity(spectrum.n() + 1 + k);
    let v = theta_doubling(
        |t| {
            let mu = Node::on(lo, hi, t).x;
            Ok(f(mu) * spectrum.inv_sqrt_product(mu, k))
        },
        8,
        QUAD_TOL,
        0.0,
        MAX_NODES,
    )?;
    Ok(sign * v / PI)
}

/// `A[k][j] = (1/pi) int_{gap k} T_j(mu/2) / sqrt(Delta^2 - 4)(mu - i0) dmu`
/// for `1 <= k < N`, `0 <= j < N - 1`; closed-gap rows hold the limit
/// `s_k q_N T_j(tau_k / 2) / sqrt(R(tau_k))`.
#[derive(Debug, Clone)]
pub struct PeriodMatrix {
    pub a: DMatrix<f64>,
    /// Midpoint nodes used per row (0 for closed rows).
    pub nodes: Vec<usize>,
    log_q: f64,
}

impl PeriodMatrix {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// `||A||_1 ||A^{-1}||_1`, or infinity when `A` is singular.
    pub fn condition(&self) -> f64 {
        match self.a.clone().try_inverse() {
            Some(inv) => norm1(&self.a) * norm1(&inv),
            None => f64::INFINITY,
        }
    }
}

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

fn period_row(spectrum: &SpectrumN, q: f64, k: usize, min_nodes: usize) -> Result<(Vec<f64>, usize)> {
    let m = spectrum.n() - 1;
    let sign = parity(spectrum.n() + 1 + k);
    let mut row = vec![0.0; m];
    if spectrum.is_closed(k) {
        let tau = spectrum.tau(k);
        chebyshev_values(tau / 2.0, &mut row);
        let w = sign * q * spectrum.inv_sqrt_product(tau, k);
        row.iter_mut().for_each(|x| *x *= w);
        return Ok((row, 0));
    }
    let (lo, hi) = spectrum.gap(k);
    let nodes = theta_doubling_vec(
        m,
        |t, v| {
            let mu = Node::on(lo, hi, t).x;
            chebyshev_values(mu / 2.0, v);
            let w = spectrum.inv_sqrt_product(mu, k);
            v.iter_mut().for_each(|x| *x *= w);
            Ok(())
        },
        min_nodes,
        QUAD_TOL,
        0.0,
        MAX_NODES,
        &mut row,
    )?;
    let w = sign * q / PI;
    row.iter_mut().for_each(|x| *x *= w);
    Ok((row, nodes))
}

pub fn period_matrix(state: &TodaState, spectrum: &SpectrumN) -> Result<PeriodMatrix> {
    let m = spectrum.n() - 1;
    let q = state.prod_q();
    let rows: Vec<(Vec<f64>, usize)> = (1..=m).into_par_iter().map(|k| period_row(spectrum, q, k, 8)).collect::<Result<_>>()?;
    let mut a = DMatrix::zeros(m, m);
    let mut nodes = Vec::with_capacity(m);
    for (k, (row, n)) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            a[(k, j)] = v;
        }
        nodes.push(n);
    }
    Ok(PeriodMatrix { a, nodes, log_q: state.log_q() })
}

/// The normalized differentials `psi_n` (Chebyshev coefficients in `T_j(mu/2)`),
/// their frequencies and the zeros of the monic `phi_n`.
#[derive(Debug, Clone)]
pub struct DifferentialBasis {
    /// Column `n - 1` holds the coefficients of `psi_n`.
    pub coeffs: DMatrix<f64>,
    /// `omega_1, ..., omega_{N-1}`
    pub freq: Vec<f64>,
    /// Frequencies read off the leading coefficient for every `n`, closed gaps included.
    pub freq_leading: Vec<f64>,
    /// Row `n - 1`: `sigma_k` for `k = 1..N-1`; the slot `k = n` holds `tau_n`.
    sigma: Vec<Vec<f64>>,
    /// `max_n ||A c_n - e_n||_inf`
    pub residual: f64,
    pub condition: f64,
    log_q: f64,
}

impl DifferentialBasis {
    pub fn n(&self) -> usize {
        self.freq.len() + 1
    }

    pub fn omega(&self, n: usize) -> f64 {
        self.freq[n - 1]
    }

    /// `sigma^{N,n}_k`, `k != n`.
    pub fn sigma(&self, n: usize, k: usize) -> Option<f64> {
        (k != n && k >= 1 && k < self.n()).then(|| self.sigma[n - 1][k - 1])
    }

    /// All zeros of `phi_n` in gap order.
    pub fn zeros(&self, n: usize) -> Vec<f64> {
        (1..self.n()).filter(|&k| k != n).map(|k| self.sigma[n - 1][k - 1]).collect()
    }

    pub fn psi(&self, n: usize, mu: f64) -> f64 {
        clenshaw(self.coeffs.column(n - 1).as_slice(), mu / 2.0)
    }

    /// Monic `phi_n(mu) = prod_{k != n} (mu - sigma_k)`, evaluated from the zeros.
    pub fn phi(&self, n: usize, mu: f64) -> f64 {
        let mut p = ScaledProduct::default();
        for s in self.zeros(n) {
            p.mul(mu - s);
        }
        p.value()
    }

    pub fn prod_q(&self) -> f64 {
        self.log_q.exp()
    }
}

/// Solves `A c_n = e_n`, reads `omega_n = q_N * (leading coefficient of psi_n)`,
/// locates the zeros and replaces closed-gap frequencies by the mean-value
/// form at `tau_n`.
pub fn psi_basis(pm: &PeriodMatrix, spectrum: &SpectrumN) -> Result<DifferentialBasis> {
    let m = pm.dim();
    let lu = pm.a.clone().lu();
    let coeffs = lu.try_inverse().ok_or(Error::SingularPeriodMatrix { n: 1, cond: f64::INFINITY })?;
    let cond = norm1(&pm.a) * norm1(&coeffs);
    let q = pm.log_q.exp();
    let resid = &pm.a * &coeffs - DMatrix::identity(m, m);
    let residual = resid.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    // T_{N-2}(mu/2) = mu^{N-2} / 2 + lower order
    let freq_leading: Vec<f64> = (0..m).map(|n| q * coeffs[(m - 1, n)] / 2.0).collect();
    if !(cond < MAX_COND) {
        let n = freq_leading.iter().position(|w| !(*w > 0.0)).unwrap_or(0) + 1;
        return Err(Error::SingularPeriodMatrix { n, cond });
    }
    let sigma: Vec<Vec<f64>> = (1..=m)
        .into_par_iter()
        .map(|n| phi_zeros_from(coeffs.column(n - 1).as_slice(), spectrum, n))
        .collect::<Result<_>>()?;
    let mut freq = freq_leading.clone();
    for n in 1..=m {
        if spectrum.is_closed(n) {
            freq[n - 1] = mean_value_frequency(spectrum, &sigma[n - 1], n, spectrum.tau(n));
        }
        if !(freq[n - 1] > 0.0) {
            return Err(Error::SingularPeriodMatrix { n, cond });
        }
    }
    Ok(DifferentialBasis { coeffs, freq, freq_leading, sigma, residual, condition: cond, log_q: pm.log_q })
}

fn phi_zeros_from(c: &[f64], spectrum: &SpectrumN, n: usize) -> Result<Vec<f64>> {
    let m = spectrum.n() - 1;
    let mut out = Vec::with_capacity(m);
    for k in 1..=m {
        if k == n || spectrum.is_closed(k) {
            out.push(spectrum.tau(k));
            continue;
        }
        let (lo, hi) = spectrum.gap(k);
        let f = |mu: f64| clenshaw(c, mu / 2.0);
        let (flo, fhi) = (f(lo), f(hi));
        if flo * fhi > 0.0 {
            return Err(Error::RootCountMismatch { n, k });
        }
        out.push(brent(f, lo, hi, flo, fhi, |x| 2.0 * f64::EPSILON * (1.0 + x.abs())));
    }
    Ok(out)
}

/// Zeros of `phi_n` in gap order (`N - 2` values); closed gaps give `tau_k`.
pub fn phi_zeros(basis: &DifferentialBasis, n: usize) -> Result<Vec<f64>> {
    if n == 0 || n >= basis.n() {
        return Err(Error::IndexOutOfRange { index: n, max: basis.n() - 1 });
    }
    Ok(basis.zeros(n))
}

/// Mean-value form of the frequency at a point `mu_star` of gap `n`:
/// `sqrt((lambda_{2N-1} - mu)(mu - lambda_0)) prod_{k != n} |w_k(mu)| / |sigma_k - mu|`,
/// with closed foreign gaps contributing exactly 1.
pub fn mean_value_frequency(spectrum: &SpectrumN, sigma_n: &[f64], n: usize, mu_star: f64) -> f64 {
    let l = spectrum.lambda();
    let top = l[l.len() - 1];
    let mut p = ScaledProduct::default();
    p.mul(((top - mu_star) * (mu_star - l[0])).sqrt());
    for k in 1..spectrum.n() {
        if k == n || spectrum.is_closed(k) {
            continue;
        }
        let (a, b) = spectrum.gap(k);
        p.mul(((b - mu_star) * (a - mu_star)).abs().sqrt() / (sigma_n[k - 1] - mu_star).abs());
    }
    p.value()
}

/// `int_{band j} (mu - p_N / N) Delta' / (i sqrt(Delta^2 - 4)) dmu`, integrated by
/// parts into `-pi (lambda_{2j-2} - p_N / N) - int_{band j} arccos((-1)^{N+j} Delta / 2)`.
/// The arccos is evaluated as `atan2(sqrt(1 - x^2), x)` with the root from the
/// eigenvalue product, since `Delta` alone loses the edge behaviour to rounding.
pub fn band_integral_first_kind(state: &TodaState, spectrum: &SpectrumN, j: usize) -> Result<f64> {
    let n = spectrum.n();
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, max: n });
    }
    let p = state.trace_p() / n as f64;
    let (lo, hi) = spectrum.band(j);
    let s = parity(n + j);
    let q = state.prod_q();
    let l = spectrum.lambda();
    let int = adaptive_gk(
        |t| {
            let node = Node::on(lo, hi, t);
            let w = node.weight(lo, hi);
            // sqrt(1 - x^2) = |sqrt(chi)| / (2 q_N), exact up to the band ends
            let mut p = ScaledProduct::default();
            p.mul(0.5 * w / q);
            for (i, &li) in l.iter().enumerate() {
                if i != 2 * j - 2 && i != 2 * j - 1 {
                    p.mul((node.x - li).abs().sqrt());
                }
            }
            let x = 0.5 * s * discriminant(state, node.x).0;
            Ok(p.value().atan2(x) * w)
        },
        0.0,
        PI,
        1e-12,
        // the cosine of the integrand only carries Delta's absolute accuracy
        (4.0 * discriminant_noise(state, 0.5 * (lo + hi))).max(1e-14) * (hi - lo),
    )?;
    Ok(-PI * (lo - p) - int)
}

/// `int_{band j} phi_k / (i sqrt(chi)) dmu` with `phi_k` given by its zeros; on
/// band `j` one has `i sqrt(chi) = -(-1)^{N+j} |sqrt(chi)|`. Common factors of
/// closed gaps cancel, and the band's own end factors are absorbed by the
/// cosine substitution.
pub fn band_integral_second_kind(spectrum: &SpectrumN, sigma_k: &[f64], k: usize, j: usize) -> Result<f64> {
    let n = spectrum.n();
    if spectrum.is_closed(k) {
        // phi_k / sqrt(chi) has a pole at tau_k then
        return Err(Error::ClosedGap(k));
    }
    let (lo, hi) = spectrum.band(j);
    let l = spectrum.lambda();
    let (ia, ib) = (2 * j - 2, 2 * j - 1);
    let v = adaptive_gk(
        |t| {
            let node = Node::on(lo, hi, t);
            let mut p = ScaledProduct::default();
            for g in 1..n {
                let (a, b) = (2 * g - 1, 2 * g);
                if spectrum.is_closed(g) {
                    // (mu - tau) / |mu - tau|, with one root factor absorbed if tau ends the band
                    let d = node.minus(spectrum.tau(g), lo, hi);
                    p.mul(if a == ib || b == ia { d.abs().sqrt() * d.signum() } else { d.signum() });
                    continue;
                }
                if g != k {
                    p.mul(node.minus(sigma_k[g - 1], lo, hi));
                }
                for i in [a, b] {
                    if i != ia && i != ib {
                        p.mul(1.0 / node.minus(l[i], lo, hi).abs().sqrt());
                    }
                }
            }
            for i in [0, 2 * n - 1] {
                if i != ia && i != ib {
                    p.mul(1.0 / node.minus(l[i], lo, hi).abs().sqrt());
                }
            }
            Ok(p.value())
        },
        0.0,
        PI,
        1e-11,
        1e-300,
    )?;
    Ok(-parity(n + j) * v)
}

/// Frequencies from the band-integral system
/// `sum_k (N delta_nk + I_k S_nk) omega_k = sum_{j <= n} F_j`, where `F_j` are
/// the first-kind band integrals and `S_nk = sum_{j <= n}` second-kind ones,
/// `k` running over the gaps with nonzero action.
pub fn frequencies_via_bands(state: &TodaState, spectrum: &SpectrumN, basis: &DifferentialBasis, actions: &ActionSet) -> Result<Vec<f64>> {
    let n = spectrum.n();
    let m = n - 1;
    let f: Vec<f64> = (1..n).into_par_iter().map(|j| band_integral_first_kind(state, spectrum, j)).collect::<Result<_>>()?;
    let active: Vec<usize> = (1..n).filter(|&k| actions.i[k - 1] != 0.0).collect();
    let g: Vec<Vec<f64>> = active
        .par_iter()
        .map(|&k| {
            let sig = &basis.sigma[k - 1];
            (1..n).map(|j| band_integral_second_kind(spectrum, sig, k, j)).collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut mat = DMatrix::zeros(m, m);
    let mut rhs = DVector::zeros(m);
    let mut acc = 0.0;
    for r in 0..m {
        acc += f[r];
        rhs[r] = acc;
        mat[(r, r)] = n as f64;
    }
    for (c, &k) in active.iter().enumerate() {
        let ik = actions.i[k - 1];
        let mut s = 0.0;
        for r in 0..m {
            s += g[c][r];
            mat[(r, k - 1)] += ik * s;
        }
    }
    let sol = mat.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    Ok(sol.iter().copied().collect())
}

/// Re-evaluates the cycle integrals of every `psi_n` over the open gaps with
/// twice the node count used for the period matrix and returns the largest
/// deviation from the identity.
pub fn normalization_defect(state: &TodaState, spectrum: &SpectrumN, pm: &PeriodMatrix, basis: &DifferentialBasis) -> Result<f64> {
    let m = pm.dim();
    let q = state.prod_q();
    let worst: Vec<f64> = (1..=m)
        .into_par_iter()
        .filter(|&k| !spectrum.is_closed(k))
        .map(|k| {
            let (row, _) = period_row(spectrum, q, k, 2 * pm.nodes[k - 1])?;
            let r = DVector::from_vec(row).transpose() * &basis.coeffs;
            Ok((0..m).map(|n| (r[n] - if n + 1 == k { 1.0 } else { 0.0 }).abs()).fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}
