mod common;

use std::f64::consts::PI;

use common::{random_state, rng, simpson};
use toda_spectra::abelian_differentials::{
    band_integral_first_kind, frequencies_via_bands, gap_cycle_integral, normalization_defect, period_matrix, phi_zeros, psi_basis,
};
use toda_spectra::jacobi_spectral::{discriminant, eigenvalues_q, SpectrumN};
use toda_spectra::toda_actions::actions_arcosh;
use toda_spectra::toda_model::{discretize, FourierProfile, TodaState};

/// Smooth form of a gap integral of `f / sqrt(chi)`: each half of the gap is
/// mapped by `mu = end +- t^2`, which removes the square-root endpoint.
fn gap_oracle(sp: &SpectrumN, k: usize, f: impl Fn(f64) -> f64) -> f64 {
    let (lo, hi) = sp.gap(k);
    let mid = 0.5 * (lo + hi);
    let others = |mu: f64| -> f64 {
        sp.lambda().iter().enumerate().filter(|(j, _)| *j != 2 * k - 1 && *j != 2 * k).map(|(_, l)| (mu - l).abs()).product::<f64>()
    };
    let left = |t: f64| {
        let mu = lo + t * t;
        2.0 * f(mu) / ((hi - mu) * others(mu)).sqrt()
    };
    let right = |t: f64| {
        let mu = hi - t * t;
        2.0 * f(mu) / ((mu - lo) * others(mu)).sqrt()
    };
    let s = (mid - lo).sqrt();
    let off = 1e-10;
    let sign = if (sp.n() + 1 + k).is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * (simpson(&left, off, s, 1e-14) + simpson(&right, off, s, 1e-14)) / PI
}

#[test]
fn gap_integral_matches_simpson() {
    let mut r = rng(3);
    for _ in 0..5 {
        let st = random_state(&mut r, 6, 0.5);
        let sp = eigenvalues_q(&st).unwrap();
        let t2 = |mu: f64| 2.0 * (mu / 2.0).powi(2) - 1.0;
        for k in 1..6 {
            let got = gap_cycle_integral(&sp, k, t2).unwrap();
            let want = gap_oracle(&sp, k, t2);
            assert!((got - want).abs() < 1e-9 * want.abs().max(1.0), "gap {k}: {got} vs {want}");
        }
    }
}

#[test]
fn equilibrium_frequencies() {
    for n in [4usize, 8, 31] {
        let st = discretize(&FourierProfile::zero(), &FourierProfile::zero(), n).unwrap();
        let sp = eigenvalues_q(&st).unwrap();
        let basis = psi_basis(&period_matrix(&st, &sp).unwrap(), &sp).unwrap();
        for m in 1..n {
            let want = 2.0 * (m as f64 * PI / n as f64).sin();
            assert!((basis.omega(m) - want).abs() < 1e-10 * want, "N = {n}, n = {m}: {}", basis.omega(m));
        }
    }
}

#[test]
fn normalization_and_two_frequency_formulas() {
    let mut r = rng(17);
    for n in [6usize, 9] {
        let st = random_state(&mut r, n, 0.4);
        let sp = eigenvalues_q(&st).unwrap();
        let pm = period_matrix(&st, &sp).unwrap();
        let basis = psi_basis(&pm, &sp).unwrap();
        assert!(normalization_defect(&st, &sp, &pm, &basis).unwrap() < 1e-10);
        let acts = actions_arcosh(&st, &sp).unwrap();
        let banded = frequencies_via_bands(&st, &sp, &basis, &acts).unwrap();
        for m in 1..n {
            assert!(basis.omega(m) > 0.0);
            let rel = (banded[m - 1] - basis.omega(m)).abs() / basis.omega(m);
            assert!(rel < 1e-7, "N = {n}, n = {m}: {} vs {}", banded[m - 1], basis.omega(m));
        }
    }
}

#[test]
fn zeros_lie_in_the_foreign_gaps() {
    let mut r = rng(5);
    let n = 8;
    let st = random_state(&mut r, n, 0.5);
    let sp = eigenvalues_q(&st).unwrap();
    let basis = psi_basis(&period_matrix(&st, &sp).unwrap(), &sp).unwrap();
    for m in 1..n {
        let z = phi_zeros(&basis, m).unwrap();
        assert_eq!(z.len(), n - 2);
        for (k, s) in (1..n).filter(|&k| k != m).zip(&z) {
            let (lo, hi) = sp.gap(k);
            assert!(lo <= *s && *s <= hi, "phi_{m} zero {s} outside gap {k}");
        }
        // phi_n has the sign of the number of zeros above its own gap
        let (lo, hi) = sp.gap(m);
        let want = if (n - 1 - m) % 2 == 0 { 1.0 } else { -1.0 };
        assert!(basis.phi(m, 0.5 * (lo + hi)) * want > 0.0);
        // psi_n is a positive multiple of phi_n
        let mu = 0.37 * lo + 0.63 * hi;
        assert!(basis.psi(m, mu) * basis.phi(m, mu) > 0.0);
    }
    assert!(phi_zeros(&basis, 0).is_err());
    assert!(phi_zeros(&basis, n).is_err());
}

#[test]
fn reflection_reverses_frequencies() {
    let mut r = rng(21);
    let n = 7;
    let st = random_state(&mut r, n, 0.4);
    let refl = st.reflect();
    let f = |s: &TodaState| {
        let sp = eigenvalues_q(s).unwrap();
        psi_basis(&period_matrix(s, &sp).unwrap(), &sp).unwrap().freq
    };
    let (a, b) = (f(&st), f(&refl));
    for m in 1..n {
        assert!((a[m - 1] - b[n - m - 1]).abs() < 1e-10);
    }
}

/// Direct band integral of `(mu - p/N) Delta' / (i sqrt(Delta^2 - 4))` with the
/// cosine substitution absorbing the two edge factors of `4 - Delta^2`.
fn band_oracle(st: &TodaState, sp: &SpectrumN, j: usize, moment: bool) -> f64 {
    let n = sp.n();
    let (lo, hi) = sp.band(j);
    let (mid, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let p = st.trace_p() / n as f64;
    let q = st.prod_q();
    let c = if (n + j).is_multiple_of(2) { 1.0 } else { -1.0 };
    let g = |th: f64| {
        let mu = mid - h * th.cos();
        let rest: f64 = sp.lambda().iter().enumerate().filter(|(i, _)| *i != 2 * j - 2 && *i != 2 * j - 1).map(|(_, l)| (mu - l).abs()).product();
        let d = discriminant(st, mu).1;
        let w = if moment { mu - p } else { 1.0 };
        -c * w * d * q / rest.sqrt()
    };
    simpson(&g, 0.0, PI, 1e-13)
}

#[test]
fn band_integrals() {
    let mut r = rng(8);
    let st = random_state(&mut r, 6, 0.5);
    let sp = eigenvalues_q(&st).unwrap();
    for j in 1..=6 {
        // Delta runs once between -2 and 2 across every band
        assert!((band_oracle(&st, &sp, j, false) + PI).abs() < 1e-9);
        let got = band_integral_first_kind(&st, &sp, j).unwrap();
        let want = band_oracle(&st, &sp, j, true);
        assert!((got - want).abs() < 1e-8, "band {j}: {got} vs {want}");
    }
}

#[test]
fn closed_gaps_are_rejected_by_the_cycle_integral() {
    let st = discretize(&FourierProfile::zero(), &FourierProfile::zero(), 6).unwrap();
    let sp = eigenvalues_q(&st).unwrap();
    assert!(gap_cycle_integral(&sp, 2, |_| 1.0).is_err());
}
