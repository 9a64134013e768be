//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};

use common::{dense_periodic_spectrum, random_profile, rng};
use toda_spectra::abelian_differentials::{frequencies_via_bands, period_matrix, psi_basis};
use toda_spectra::harness::{fit_rate, verify_symmetry, ConvergenceReport, Sweep, SweepConfig, TodaRun, DEFAULT_N_LIST};
use toda_spectra::hill_kdv::{hill_discriminant, hill_eigenvalues, HillPotential, KdvData};
use toda_spectra::jacobi_spectral::{discriminant, eigenvalues_q};
use toda_spectra::toda_actions::{actions_arcosh, actions_moment};
use toda_spectra::toda_model::{discretize, evolve_lax, FourierProfile, TodaState};

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn standard() -> (FourierProfile, FourierProfile) {
    (FourierProfile::cos_mode(1, 1.0), FourierProfile::sin_mode(1, 1.0))
}

fn equilibrium_exactness() -> Outcome {
    let (mut worst_w, mut worst_l) = (0.0f64, 0.0f64);
    for n in [8usize, 32, 128, 512] {
        let st = TodaState::equilibrium(n).map_err(err)?;
        let sp = eigenvalues_q(&st).map_err(err)?;
        for (i, &l) in sp.lambda().iter().enumerate() {
            worst_l = worst_l.max((l + 2.0 * (i.div_ceil(2) as f64 * PI / n as f64).cos()).abs());
        }
        let basis = psi_basis(&period_matrix(&st, &sp).map_err(err)?, &sp).map_err(err)?;
        for m in 1..n {
            let want = 2.0 * (m as f64 * PI / n as f64).sin();
            worst_w = worst_w.max((basis.omega(m) - want).abs() / want);
        }
    }
    ensure(worst_w < 1e-9 && worst_l < 1e-10, format!("max rel_err(omega) {worst_w:.2e}, max abs_err(lambda) {worst_l:.2e}"))
}

fn oracle_equivalence() -> Outcome {
    let mut r = rng(2024);
    let (mut worst_ev, mut worst_prod) = (0.0f64, 0.0f64);
    for n in [6usize, 12] {
        for _ in 0..10 {
            let alpha = random_profile(&mut r, 2, 15.0);
            let beta = random_profile(&mut r, 2, 15.0);
            let st = discretize(&alpha, &beta, n).map_err(err)?;
            let sp = eigenvalues_q(&st).map_err(err)?;
            let dense = dense_periodic_spectrum(&st);
            for (x, y) in sp.lambda().iter().zip(&dense) {
                worst_ev = worst_ev.max((x - y).abs());
            }
            let q = st.prod_q();
            let l = sp.lambda();
            let (lo, hi) = (l[0] - 0.1, l[2 * n - 1] + 0.1);
            for i in 0..20 {
                let mu = lo + (hi - lo) * (i as f64 + 0.5) / 20.0;
                let d = discriminant(&st, mu).0;
                let prod = l.iter().map(|x| mu - x).product::<f64>() / (q * q);
                worst_prod = worst_prod.max(((d * d - 4.0) - prod).abs() / prod.abs());
            }
        }
    }
    ensure(worst_ev < 1e-10 && worst_prod < 1e-9, format!("max eigenvalue diff {worst_ev:.2e}, max rel product diff {worst_prod:.2e}"))
}

fn cross_formula() -> Outcome {
    let (alpha, beta) = standard();
    let (mut worst_i, mut worst_w) = (0.0f64, 0.0f64);
    for n in [32usize, 64, 128] {
        let st = discretize(&alpha, &beta, n).map_err(err)?;
        let sp = eigenvalues_q(&st).map_err(err)?;
        let a = actions_arcosh(&st, &sp).map_err(err)?;
        let b = actions_moment(&st, &sp).map_err(err)?;
        worst_i = a.i.iter().zip(&b.i).map(|(x, y)| (x - y).abs()).fold(worst_i, f64::max);
        let run = TodaRun::compute(st).map_err(err)?;
        let wb = frequencies_via_bands(&run.state, &run.spectrum, &run.basis, &run.actions).map_err(err)?;
        worst_w = run.basis.freq.iter().zip(&wb).map(|(x, y)| (x - y).abs() / x.abs()).fold(worst_w, f64::max);
    }
    ensure(worst_i < 1e-8 && worst_w < 1e-6, format!("max action diff {worst_i:.2e}, max rel frequency diff {worst_w:.2e}"))
}

fn hill_closed_forms() -> Outcome {
    let q = HillPotential::zero();
    let worst_d = (0..=1000)
        .map(|i| {
            let lam = 0.5 * i as f64;
            (hill_discriminant(&q, lam).0 - 2.0 * (lam.sqrt() / 2.0).cos()).abs()
        })
        .fold(0.0, f64::max);
    let sp = hill_eigenvalues(&q, 8).map_err(err)?;
    let mut worst_l = sp.lambda()[0].abs();
    for n in 1..=8 {
        let want = 4.0 * PI * PI * (n * n) as f64;
        for l in [sp.lambda()[2 * n - 1], sp.lambda()[2 * n]] {
            worst_l = worst_l.max((l - want).abs() / want);
        }
    }
    let data = KdvData::compute(&q, 8, 8, 4).map_err(err)?;
    let worst_w = (1..=4)
        .map(|n| {
            let want = (4.0 * PI * n as f64).powi(3);
            (data.frequencies[n - 1] - want).abs() / want
        })
        .fold(0.0, f64::max);
    ensure(
        worst_d < 1e-10 && worst_l < 1e-8 && worst_w < 1e-6,
        format!("Delta err {worst_d:.2e}, eigenvalue rel err {worst_l:.2e}, KdV frequency rel err {worst_w:.2e}"),
    )
}

fn edge_spectrum(rep: &ConvergenceReport) -> Outcome {
    let fits = fit_rate(&rep.rows).map_err(err)?;
    let mut slopes = Vec::new();
    for n in 1..=4 {
        let f = fits.iter().find(|f| f.check == "spectrum_left" && f.n == n).ok_or(format!("no fit for n = {n}"))?;
        slopes.push(f.slope);
    }
    let ok = slopes.iter().all(|&s| s < -0.3);
    ensure(ok, format!("slopes for n = 1..4: {}", slopes.iter().map(|s| format!("{s:.3}")).collect::<Vec<_>>().join(", ")))
}

fn rel_at(rep: &ConvergenceReport, check: &str, big_n: usize, n: usize) -> Result<f64, String> {
    rep.row(check, big_n, n).map(|r| r.rel_err).ok_or(format!("missing {check} n = {n} at N = {big_n}"))
}

fn edge_actions(rep: &ConvergenceReport, lo: usize, hi: usize) -> Outcome {
    let (l_lo, l_hi) = (rel_at(rep, "actions_left", lo, 1)?, rel_at(rep, "actions_left", hi, 1)?);
    let (r_lo, r_hi) = (rel_at(rep, "actions_right", lo, 1)?, rel_at(rep, "actions_right", hi, 1)?);
    ensure(
        l_hi < 0.05 && l_hi < l_lo && r_hi < 0.05 && r_hi < r_lo,
        format!("rel_err I_1: {l_lo:.2e} -> {l_hi:.2e}; I_(N-1): {r_lo:.2e} -> {r_hi:.2e}"),
    )
}

fn decreasing(rep: &ConvergenceReport, check: &str, n: usize) -> bool {
    let g = rep.group(check, n);
    let first = g.iter().min_by_key(|r| r.big_n).map(|r| r.abs_err);
    let last = g.iter().max_by_key(|r| r.big_n).map(|r| r.abs_err);
    matches!((first, last), (Some(a), Some(b)) if b < a)
}

fn edge_frequencies(rep: &ConvergenceReport, hi: usize) -> Outcome {
    let edge = rel_at(rep, "freq_left", hi, 1)?;
    let bulk = rep.row("freq_mid", hi, 0).map(|r| r.abs_err).ok_or("missing freq_mid")?;
    let near: Vec<f64> = rep.group("freq_near_edge", 0).iter().map(|r| r.computed).collect();
    let (nlo, nhi) = near.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    let near_ok = !near.is_empty() && nhi.is_finite() && nhi <= 10.0 * nlo;
    let ok = edge < 0.10 && decreasing(rep, "freq_left", 1) && bulk < 1e-2 && decreasing(rep, "freq_mid", 0) && near_ok;
    ensure(ok, format!("edge rel_err {edge:.2e}, bulk err {bulk:.2e}, near-edge constant in [{nlo:.3e}, {nhi:.3e}]"))
}

fn symmetry() -> Outcome {
    let (alpha, beta) = standard();
    let st = discretize(&alpha, &beta, 64).map_err(err)?;
    let rep = verify_symmetry(&st).map_err(err)?;
    let worst = rep.rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);
    let kinds: std::collections::BTreeSet<&str> = rep.rows.iter().map(|r| r.check.as_str()).collect();
    ensure(rep.passed() && worst < 1e-9 && kinds.len() == 5, format!("{} identities, largest error {worst:.2e}", kinds.len()))
}

fn discriminant_limit(rep: &ConvergenceReport, lo: usize, hi: usize) -> Outcome {
    let get = |big_n| rep.row("discriminant_left", big_n, 0).map(|r| r.abs_err).ok_or("missing discriminant rows".to_string());
    let (a, b) = (get(lo)?, get(hi)?);
    ensure(b < a, format!("sup error {a:.2e} at N = {lo}, {b:.2e} at N = {hi}"))
}

fn isospectrality() -> Outcome {
    let b = (0..8).map(|k| (0.9 * k as f64).sin()).collect();
    let a = (0..8).map(|k| 1.0 + 0.5 * (1.3 * k as f64).cos().abs()).collect();
    let st = TodaState::new(b, a).map_err(err)?;
    let start = eigenvalues_q(&st).map_err(err)?;
    let drift = |dt: f64| -> Result<f64, String> {
        let tr = evolve_lax(&st, 10.0, dt, usize::MAX).map_err(err)?;
        let end = eigenvalues_q(tr.states.last().ok_or("empty trajectory")?).map_err(err)?;
        Ok(start.lambda().iter().zip(end.lambda()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
    };
    let (d1, d2) = (drift(1e-3)?, drift(5e-4)?);
    let ratio = d1 / d2;
    ensure(d1 < 1e-8 && (12.0..=20.0).contains(&ratio), format!("drift {d1:.2e} at dt = 1e-3, {d2:.2e} at dt = 5e-4, ratio {ratio:.1}"))
}

fn main() {
    let n_list = DEFAULT_N_LIST.to_vec();
    let (lo, hi) = (n_list[0], n_list[n_list.len() - 1]);
    let sweep = SweepConfig::standard(n_list).and_then(Sweep::new);
    let report = |f: fn(&Sweep) -> toda_spectra::Result<ConvergenceReport>| -> Result<ConvergenceReport, String> {
        let s = sweep.as_ref().map_err(err)?;
        f(s).map_err(err)
    };
    let spectrum = report(Sweep::spectrum);
    let disc = report(Sweep::discriminant);
    let actions = report(Sweep::actions);
    let freqs = report(Sweep::frequencies);

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("equilibrium exactness", Box::new(equilibrium_exactness)),
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("cross-formula consistency", Box::new(cross_formula)),
        ("Hill zero-potential closed forms", Box::new(hill_closed_forms)),
        ("edge eigenvalue convergence", Box::new(|| edge_spectrum(spectrum.as_ref()?))),
        ("edge actions", Box::new(|| edge_actions(actions.as_ref()?, lo, hi))),
        ("frequencies at order N^-3", Box::new(|| edge_frequencies(freqs.as_ref()?, hi))),
        ("reflection symmetry", Box::new(symmetry)),
        ("discriminant convergence", Box::new(|| discriminant_limit(disc.as_ref()?, lo, hi))),
        ("isospectral flow", Box::new(isospectrality)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(d) => println!("PASS {:>2} {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
