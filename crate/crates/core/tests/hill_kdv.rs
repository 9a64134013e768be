mod common;

use std::f64::consts::PI;

use common::{fourier_hill_spectrum, rng};
use rand::Rng;
use toda_spectra::hill_kdv::{hill_discriminant, hill_eigenvalues, hkdv_reference, kdv_actions, HillPotential, KdvData};
use toda_spectra::toda_model::FourierProfile;

fn even_profile(r: &mut rand::rngs::StdRng, amp: f64) -> HillPotential {
    let mut p = FourierProfile::zero();
    for k in [2usize, 4, 6] {
        p = p.add(&FourierProfile::cos_mode(k, r.gen_range(-amp..amp)));
        p = p.add(&FourierProfile::sin_mode(k, r.gen_range(-amp..amp)));
    }
    HillPotential::new(p).unwrap()
}

#[test]
fn spectrum_matches_fourier_truncation() {
    let mut r = rng(9);
    for _ in 0..3 {
        let q = even_profile(&mut r, 20.0);
        let sp = hill_eigenvalues(&q, 6).unwrap();
        let oracle = fourier_hill_spectrum(&q, 24);
        for (j, (x, y)) in sp.lambda().iter().zip(&oracle).enumerate() {
            assert!((x - y).abs() < 1e-8 * y.abs().max(1.0), "lambda_{j}: {x} vs {y}");
        }
    }
}

#[test]
fn free_operator() {
    let q = HillPotential::zero();
    for i in 0..200 {
        let lam = 2.5 * i as f64 + 0.3;
        let d = hill_discriminant(&q, lam).0;
        assert!((d - 2.0 * (lam.sqrt() / 2.0).cos()).abs() < 1e-10, "{lam}: {d}");
    }
    let sp = hill_eigenvalues(&q, 5).unwrap();
    assert!(sp.lambda()[0].abs() < 1e-10);
    for n in 1..=5 {
        let want = 4.0 * PI * PI * (n * n) as f64;
        assert!(sp.is_closed(n));
        assert!((sp.tau(n) - want).abs() < 1e-8 * want);
    }
}

#[test]
fn free_kdv_frequencies() {
    let data = KdvData::compute(&HillPotential::zero(), 8, 8, 4).unwrap();
    for n in 1..=4 {
        let want = (4.0 * PI * n as f64).powi(3);
        let got = data.frequencies[n - 1];
        assert!((got - want).abs() < 1e-6 * want, "n = {n}: {got} vs {want}");
    }
    assert!(data.actions.i.iter().all(|&x| x == 0.0));
}

#[test]
fn small_mathieu_gap() {
    let c = 0.1;
    let q = HillPotential::new(FourierProfile::cos_mode(2, c)).unwrap();
    let sp = hill_eigenvalues(&q, 3).unwrap();
    // first-order perturbation opens gap 1 to the Fourier coefficient size
    assert!((sp.gamma(1) - c).abs() < 1e-3);
    let acts = kdv_actions(&sp).unwrap();
    assert!(acts.i[0] > 0.0);
    assert!((acts.j[0] - acts.i[0] / (2.0 * sp.gamma(1))).abs() < 1e-15);
}

#[test]
fn mirrored_potential_is_isospectral() {
    let mut r = rng(13);
    let q = even_profile(&mut r, 10.0);
    let a = hill_eigenvalues(&q, 5).unwrap();
    let b = hill_eigenvalues(&q.mirrored(), 5).unwrap();
    for (x, y) in a.lambda().iter().zip(b.lambda()) {
        assert!((x - y).abs() < 1e-9 * y.abs().max(1.0));
    }
}

#[test]
fn odd_harmonics_are_rejected() {
    assert!(HillPotential::new(FourierProfile::cos_mode(1, 1.0)).is_err());
}

#[test]
fn hkdv_reference_form() {
    let v = hkdv_reference(32, 3, 1000.0);
    let want = 2.0 * PI * 3.0 / 32.0 - 1000.0 / (24.0 * 64f64.powi(3));
    assert!((v - want).abs() < 1e-15);
}
