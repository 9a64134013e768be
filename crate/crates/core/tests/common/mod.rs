//! Independent reference implementations for the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use toda_spectra::hill_kdv::HillPotential;
use toda_spectra::toda_model::{FourierProfile, TodaState};

/// Eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let norm: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j].powi(2)).sum();
        if off.sqrt() <= 1e-17 * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// The `2N`-periodic Jacobi matrix of the chain repeated twice; its spectrum
/// is the union of the periodic and antiperiodic spectra of the chain.
pub fn doubled_jacobi(state: &TodaState) -> Vec<Vec<f64>> {
    let n = state.len();
    let m = 2 * n;
    let mut a = vec![vec![0.0; m]; m];
    for i in 0..m {
        a[i][i] = state.b()[i % n];
        let j = (i + 1) % m;
        a[i][j] += state.a()[i % n];
        a[j][i] += state.a()[i % n];
    }
    a
}

/// Periodic eigenvalues `lambda_0 <= ... <= lambda_{2N-1}` of the chain by dense diagonalization.
pub fn dense_periodic_spectrum(state: &TodaState) -> Vec<f64> {
    jacobi_eigenvalues(doubled_jacobi(state))
}

/// Periodic spectrum of `-y'' + q y` on the period `1/2` from the Fourier
/// truncation `|j| <= 2 modes + 1`: exponentials `exp(2 pi i j x)` with `j` even
/// give the periodic, `j` odd the antiperiodic eigenvalues. The complex
/// Hermitian matrices are diagonalized through their real `2 x 2` block form.
pub fn fourier_hill_spectrum(q: &HillPotential, modes: usize) -> Vec<f64> {
    let terms: Vec<(usize, f64, f64)> = q.profile().terms().collect();
    let coeff = |d: i64| -> (f64, f64) {
        if d == 0 {
            return (0.0, 0.0);
        }
        let k = d.unsigned_abs() as usize;
        match terms.iter().find(|t| t.0 == k) {
            // q^_k = (c - i s)/2, q^_{-k} = (c + i s)/2
            Some(&(_, c, s)) => (c / 2.0, if d > 0 { -s / 2.0 } else { s / 2.0 }),
            None => (0.0, 0.0),
        }
    };
    let mut all = Vec::new();
    for parity in [0i64, 1] {
        let js: Vec<i64> = (-(modes as i64)..=modes as i64).map(|m| 2 * m + parity).collect();
        let d = js.len();
        let mut re = vec![vec![0.0; 2 * d]; 2 * d];
        for (r, &j) in js.iter().enumerate() {
            for (c, &jp) in js.iter().enumerate() {
                let (mut x, y) = coeff(j - jp);
                if r == c {
                    x += (2.0 * PI * j as f64).powi(2);
                }
                re[r][c] = x;
                re[r + d][c + d] = x;
                re[r][c + d] = -y;
                re[r + d][c] = y;
            }
        }
        let ev = jacobi_eigenvalues(re);
        // every eigenvalue of the Hermitian matrix appears twice
        all.extend(ev.iter().step_by(2).copied());
    }
    all.sort_by(f64::total_cmp);
    all
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Simpson on `[a, b]` split at the given interior points, with each piece
/// pulled in by `offset` at both ends to stay off endpoint singularities.
pub fn simpson_split<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, pieces: usize, offset: f64, tol: f64) -> f64 {
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = lo + h;
            let lo = if i == 0 { lo + offset } else { lo };
            let hi = if i + 1 == pieces { hi - offset } else { hi };
            simpson(f, lo, hi, tol / pieces as f64)
        })
        .collect::<Vec<_>>()
        .iter()
        .sum()
}

/// Random trigonometric profile of the given degree with coefficients in `[-amp, amp]`.
pub fn random_profile(rng: &mut StdRng, degree: usize, amp: f64) -> FourierProfile {
    let cos = (0..degree).map(|_| rng.gen_range(-amp..amp)).collect();
    let sin = (0..degree).map(|_| rng.gen_range(-amp..amp)).collect();
    FourierProfile::new(cos, sin).unwrap()
}

/// A chain with `O(1)` deviations from equilibrium, all gaps open.
pub fn random_state(rng: &mut StdRng, n: usize, amp: f64) -> TodaState {
    let b = (0..n).map(|_| rng.gen_range(-amp..amp)).collect();
    let a = (0..n).map(|_| 1.0 + rng.gen_range(-amp..amp) * 0.5).collect();
    TodaState::new(b, a).unwrap()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
