//! N-sweeps comparing the Toda edge quantities with the Hill/KdV limits, rate
//! fits and the pass/fail assertions attached to each check.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian_differentials::{frequencies_via_bands, period_matrix, psi_basis, DifferentialBasis};
use crate::error::{Error, Result};
use crate::hill_kdv::{hkdv_reference, KdvData, DEFAULT_K, DEFAULT_K_SIGMA, DEFAULT_N_MAX};
use crate::jacobi_spectral::{discriminant, eigenvalues_q, SpectrumN};
use crate::toda_actions::{actions_arcosh, actions_moment, ActionSet};
use crate::toda_model::{discretize, potentials, FourierProfile, TodaState};

/// Thresholds for the assertions made by the checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Groups whose errors all stay below this count as exact and pass any trend test.
    pub trend_floor: f64,
    /// Fitted slope required of the low edge eigenvalue groups `n <= 4`.
    pub spectrum_slope: f64,
    /// Relative error of `8N^2 I_1` at the largest `N`.
    pub action_rel: f64,
    /// Relative error of the rescaled first frequency at the largest `N`.
    pub freq_rel: f64,
    /// `|omega_{N/2} / 2 - 1|` at the largest `N`.
    pub bulk_freq: f64,
    /// Largest over smallest value of the near-edge frequency constant.
    pub near_edge_spread: f64,
    pub symmetry: f64,
    /// Absolute gap between the two action formulas.
    pub action_cross: f64,
    /// Relative gap between the two frequency formulas.
    pub freq_cross: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            trend_floor: 1e-9,
            spectrum_slope: -0.3,
            action_rel: 0.05,
            freq_rel: 0.10,
            bulk_freq: 1e-2,
            near_edge_spread: 10.0,
            symmetry: 1e-9,
            action_cross: 1e-8,
            freq_cross: 1e-6,
        }
    }
}

impl Tolerances {
    /// Replaces every threshold that is a tolerance proper (not a slope or a
    /// spread) by `tol`.
    pub fn override_all(&mut self, tol: f64) {
        self.trend_floor = tol;
        self.action_rel = tol;
        self.freq_rel = tol;
        self.bulk_freq = tol;
        self.symmetry = tol;
        self.action_cross = tol;
        self.freq_cross = tol;
    }
}

/// Profile pair, particle counts and edge-width exponents of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub alpha: FourierProfile,
    pub beta: FourierProfile,
    pub n_list: Vec<usize>,
    /// Edge-width exponent for the frequency and zero checks.
    pub eta_freq: f64,
    /// Edge-width exponent for the eigenvalue, discriminant and action checks.
    pub eta_action: f64,
    /// Hill gaps resolved for the references.
    pub k: usize,
    pub k_sigma: usize,
    pub n_max: usize,
    pub tol: Tolerances,
}

pub const DEFAULT_ETA_FREQ: f64 = 1.0 / 3.0;
pub const DEFAULT_ETA_ACTION: f64 = 0.45;
pub const DEFAULT_N_LIST: [usize; 5] = [32, 64, 128, 256, 512];

impl SweepConfig {
    pub fn new(alpha: FourierProfile, beta: FourierProfile, n_list: Vec<usize>) -> Result<Self> {
        let c = SweepConfig {
            alpha,
            beta,
            n_list,
            eta_freq: DEFAULT_ETA_FREQ,
            eta_action: DEFAULT_ETA_ACTION,
            k: DEFAULT_K,
            k_sigma: DEFAULT_K_SIGMA,
            n_max: DEFAULT_N_MAX,
            tol: Tolerances::default(),
        };
        c.validate()?;
        Ok(c)
    }

    /// `alpha = cos 2 pi x`, `beta = sin 2 pi x`.
    pub fn standard(n_list: Vec<usize>) -> Result<Self> {
        Self::new(FourierProfile::cos_mode(1, 1.0), FourierProfile::sin_mode(1, 1.0), n_list)
    }

    pub fn equilibrium(n_list: Vec<usize>) -> Result<Self> {
        Self::new(FourierProfile::zero(), FourierProfile::zero(), n_list)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::Config("N_list is empty".into()));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("N_list must be strictly increasing".into()));
        }
        if self.n_list[0] < 4 {
            return Err(Error::Config(format!("N = {} is too small, need N >= 4", self.n_list[0])));
        }
        if !(self.eta_freq > 0.0 && self.eta_freq <= 1.0 / 3.0 + 1e-12) {
            return Err(Error::Config(format!("eta_freq = {} outside (0, 1/3]", self.eta_freq)));
        }
        if !(self.eta_action > 0.0 && self.eta_action < 0.5) {
            return Err(Error::Config(format!("eta_action = {} outside (0, 1/2)", self.eta_action)));
        }
        if self.k == 0 || self.k_sigma == 0 || self.n_max == 0 {
            return Err(Error::Config("K, K_sigma and n_max must be positive".into()));
        }
        Ok(())
    }

    fn n_min(&self) -> usize {
        self.n_list[0]
    }

    fn n_top(&self) -> usize {
        *self.n_list.last().expect("validated")
    }
}

/// `floor(n^eta)`, guarded against `powf` landing just below an integer.
pub fn edge_width(n: usize, eta: f64) -> usize {
    ((n as f64).powf(eta) + 1e-9).floor().max(1.0) as usize
}

/// `(M, L)` with `M = floor(N^eta)` and `L = floor(M^eta)`.
pub fn edge_widths(n: usize, eta: f64) -> (usize, usize) {
    let m = edge_width(n, eta);
    (m, edge_width(m, eta))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub check: String,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub n: usize,
    pub computed: f64,
    pub reference: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    /// Fitted log-log slope of the row's `(check, n)` group, if it has three points.
    pub slope: Option<f64>,
    #[serde(default)]
    pub fail: bool,
}

impl ReportRow {
    pub fn new(check: impl Into<String>, big_n: usize, n: usize, computed: f64, reference: f64) -> Self {
        let abs_err = (computed - reference).abs();
        let rel_err = if reference != 0.0 { abs_err / reference.abs() } else { abs_err };
        ReportRow { check: check.into(), big_n, n, computed, reference, abs_err, rel_err, slope: None, fail: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub check: String,
    pub n: usize,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
    pub assertions: Vec<Assertion>,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed)
    }

    pub fn append(&mut self, mut other: ConvergenceReport) {
        self.rows.append(&mut other.rows);
        self.assertions.append(&mut other.assertions);
    }

    pub fn group(&self, check: &str, n: usize) -> Vec<&ReportRow> {
        self.rows.iter().filter(|r| r.check == check && r.n == n).collect()
    }

    /// The row of `(check, n)` at particle count `big_n`.
    pub fn row(&self, check: &str, big_n: usize, n: usize) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.check == check && r.big_n == big_n && r.n == n)
    }

    fn assert(&mut self, check: &str, n: usize, passed: bool, detail: String) {
        self.assertions.push(Assertion { check: check.into(), n, passed, detail });
    }

    /// Fills in the slopes and flags the rows of failed groups.
    fn finish(mut self) -> Self {
        if let Ok(fits) = fit_rate(&self.rows) {
            let map: BTreeMap<(String, usize), f64> = fits.into_iter().map(|f| ((f.check, f.n), f.slope)).collect();
            for r in &mut self.rows {
                r.slope = map.get(&(r.check.clone(), r.n)).copied();
            }
        }
        for a in self.assertions.iter().filter(|a| !a.passed) {
            for r in self.rows.iter_mut().filter(|r| r.check == a.check && r.n == a.n) {
                r.fail = true;
            }
        }
        self
    }

    /// Error at the largest `N` below the one at the smallest `N`, and a
    /// negative fitted slope, unless the whole group sits below `floor`.
    fn assert_trend(&mut self, check: &str, n: usize, floor: f64) {
        let mut g: Vec<(usize, f64)> = self.group(check, n).iter().map(|r| (r.big_n, r.abs_err)).collect();
        if g.len() < 2 {
            return;
        }
        g.sort_by_key(|p| p.0);
        let worst = g.iter().map(|p| p.1).fold(0.0, f64::max);
        let (first, last) = (g[0].1, g[g.len() - 1].1);
        if worst <= floor {
            self.assert(check, n, true, format!("all errors below {floor:e}"));
            return;
        }
        let slope = if g.len() >= 3 { Some(least_squares_slope(&g)) } else { None };
        let passed = last < first && slope.is_none_or(|s| s < 0.0);
        self.assert(check, n, passed, format!("error {first:e} -> {last:e}, slope {}", fmt_slope(slope)));
    }

    fn assert_slope_below(&mut self, check: &str, n: usize, floor: f64, bound: f64) {
        let g: Vec<(usize, f64)> = self.group(check, n).iter().map(|r| (r.big_n, r.abs_err)).collect();
        if g.len() < 3 || g.iter().all(|p| p.1 <= floor) {
            return;
        }
        let s = least_squares_slope(&g);
        self.assert(check, n, s < bound, format!("slope {s:.3} against bound {bound}"));
    }

    fn assert_rel_at(&mut self, check: &str, big_n: usize, n: usize, bound: f64) {
        let Some(r) = self.row(check, big_n, n) else { return };
        let rel = r.rel_err;
        self.assert(check, n, rel < bound, format!("rel_err {rel:e} at N = {big_n} against {bound:e}"));
    }

    fn assert_abs_all(&mut self, check: &str, n: usize, bound: f64) {
        let worst = self.group(check, n).iter().map(|r| r.abs_err).fold(0.0, f64::max);
        self.assert(check, n, worst <= bound, format!("largest abs_err {worst:e} against {bound:e}"));
    }

    fn assert_rel_all(&mut self, check: &str, n: usize, bound: f64) {
        let worst = self.group(check, n).iter().map(|r| r.rel_err).fold(0.0, f64::max);
        self.assert(check, n, worst <= bound, format!("largest rel_err {worst:e} against {bound:e}"));
    }
}

fn fmt_slope(s: Option<f64>) -> String {
    s.map_or_else(|| "n/a".into(), |s| format!("{s:.3}"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub check: String,
    pub n: usize,
    pub slope: f64,
    pub points: usize,
}

fn least_squares_slope(points: &[(usize, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.max(1e-300).ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Least-squares slope of `ln(abs_err)` against `ln(N)` for every `(check, n)`
/// group with at least three distinct `N`. Zero errors are clamped to `1e-300`.
pub fn fit_rate(rows: &[ReportRow]) -> Result<Vec<RateFit>> {
    let mut groups: BTreeMap<(&str, usize), BTreeMap<usize, f64>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.check.as_str(), r.n)).or_default().insert(r.big_n, r.abs_err);
    }
    let most = groups.values().map(|g| g.len()).max().unwrap_or(0);
    if most < 3 {
        return Err(Error::InsufficientData(most));
    }
    Ok(groups
        .into_iter()
        .filter(|(_, g)| g.len() >= 3)
        .map(|((check, n), g)| {
            let pts: Vec<(usize, f64)> = g.into_iter().collect();
            RateFit { check: check.to_string(), n, slope: least_squares_slope(&pts), points: pts.len() }
        })
        .collect())
}

/// Largest `|c - r|` among candidate pairs, as the pair itself.
fn worst(pairs: impl Iterator<Item = (f64, f64)>) -> Option<(f64, f64)> {
    pairs.fold(None, |acc: Option<(f64, f64)>, p| match acc {
        Some(a) if (a.0 - a.1).abs() >= (p.0 - p.1).abs() => Some(a),
        _ => Some(p),
    })
}

/// Hill/KdV data of both edge potentials for a sweep.
#[derive(Debug, Clone)]
pub struct EdgeLimits {
    pub minus: KdvData,
    pub plus: KdvData,
}

impl EdgeLimits {
    pub fn compute(config: &SweepConfig) -> Result<Self> {
        let (m_top, _) = edge_widths(config.n_top(), config.eta_action);
        let k = config.k.max(m_top);
        let (qm, qp) = potentials(&config.alpha, &config.beta);
        let (minus, plus) = rayon::join(
            || KdvData::compute(&qm, k, config.k_sigma, config.n_max),
            || KdvData::compute(&qp, k, config.k_sigma, config.n_max),
        );
        Ok(EdgeLimits { minus: minus?, plus: plus? })
    }

    fn side(&self, right: bool) -> &KdvData {
        if right {
            &self.plus
        } else {
            &self.minus
        }
    }
}

/// Everything computed for one chain.
#[derive(Debug, Clone)]
pub struct TodaRun {
    pub state: TodaState,
    pub spectrum: SpectrumN,
    pub actions: ActionSet,
    pub basis: DifferentialBasis,
}

impl TodaRun {
    pub fn compute(state: TodaState) -> Result<Self> {
        let spectrum = eigenvalues_q(&state)?;
        let actions = actions_arcosh(&state, &spectrum)?;
        let pm = period_matrix(&state, &spectrum)?;
        let basis = psi_basis(&pm, &spectrum)?;
        Ok(TodaRun { state, spectrum, actions, basis })
    }

    pub fn n(&self) -> usize {
        self.state.len()
    }
}

/// A sweep with its edge limits computed once.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub config: SweepConfig,
    pub limits: EdgeLimits,
}

const SIDES: [(bool, &str); 2] = [(false, "left"), (true, "right")];

impl Sweep {
    pub fn new(config: SweepConfig) -> Result<Self> {
        config.validate()?;
        let limits = EdgeLimits::compute(&config)?;
        Ok(Sweep { config, limits })
    }

    fn state(&self, n: usize) -> Result<TodaState> {
        discretize(&self.config.alpha, &self.config.beta, n)
    }

    fn per_n<F>(&self, f: F) -> Result<ConvergenceReport>
    where
        F: Fn(usize) -> Result<Vec<ReportRow>> + Sync,
    {
        let parts: Vec<Vec<ReportRow>> = self.config.n_list.par_iter().map(|&n| f(n)).collect::<Result<_>>()?;
        Ok(ConvergenceReport { rows: parts.into_iter().flatten().collect(), assertions: Vec::new() })
    }

    /// Edge eigenvalues `4N^2(lambda_n + 2)` against the Hill spectra for
    /// `n <= 2M`, and the bulk against `-2 cos(l pi / N)`.
    pub fn spectrum(&self) -> Result<ConvergenceReport> {
        let eta = self.config.eta_action;
        let mut rep = self.per_n(|n| {
            let sp = eigenvalues_q(&self.state(n)?)?;
            let l = sp.lambda();
            let (m, _) = edge_widths(n, eta);
            let s = 4.0 * (n * n) as f64;
            let mut rows = Vec::new();
            for (right, name) in SIDES {
                let hill = self.limits.side(right).spectrum.lambda();
                for i in 0..=(2 * m).min(hill.len() - 1) {
                    let nu = if right { s * (2.0 - l[2 * n - 1 - i]) } else { s * (l[i] + 2.0) };
                    rows.push(ReportRow::new(format!("spectrum_{name}"), n, i, nu, hill[i]));
                }
            }
            let bulk = |ell: usize| -2.0 * (ell as f64 * PI / n as f64).cos();
            if let Some((c, r)) = worst((m + 1..n - m).flat_map(|ell| [(l[2 * ell], bulk(ell)), (l[2 * ell - 1], bulk(ell))])) {
                rows.push(ReportRow::new("spectrum_bulk", n, 0, c, r));
            }
            let mid = n / 2;
            if let Some((c, r)) = worst([(l[2 * mid], bulk(mid)), (l[2 * mid - 1], bulk(mid))].into_iter()) {
                rows.push(ReportRow::new("spectrum_mid", n, 0, c, r));
            }
            Ok(rows)
        })?;
        let tol = &self.config.tol;
        let (m0, _) = edge_widths(self.config.n_min(), eta);
        for (_, name) in SIDES {
            let check = format!("spectrum_{name}");
            for i in 0..=2 * m0 {
                rep.assert_trend(&check, i, tol.trend_floor);
                if (1..=4).contains(&i) {
                    rep.assert_slope_below(&check, i, tol.trend_floor, tol.spectrum_slope);
                }
            }
        }
        rep.assert_trend("spectrum_bulk", 0, tol.trend_floor);
        rep.assert_trend("spectrum_mid", 0, tol.trend_floor);
        Ok(rep.finish())
    }

    /// Sup-grid errors of `(-1)^N Delta_N(-2 + lam/4N^2) - Delta_-(lam)`, the
    /// mirrored right edge, and the same for the `lam` derivatives, on
    /// `[lam_0 - 1, lam_6 + 1]` of the respective Hill spectrum.
    pub fn discriminant(&self) -> Result<ConvergenceReport> {
        const GRID: usize = 200;
        let grids: Vec<Vec<(f64, f64, f64)>> = SIDES
            .iter()
            .map(|&(right, _)| {
                let hs = &self.limits.side(right).spectrum;
                let l = hs.lambda();
                let (lo, hi) = (l[0] - 1.0, l[6.min(l.len() - 1)] + 1.0);
                (0..=GRID)
                    .into_par_iter()
                    .map(|i| {
                        let lam = lo + (hi - lo) * i as f64 / GRID as f64;
                        let (d, dd) = hs.discriminant(lam);
                        (lam, d, dd)
                    })
                    .collect()
            })
            .collect();
        let mut rep = self.per_n(|n| {
            let st = self.state(n)?;
            let s = 4.0 * (n * n) as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let mut rows = Vec::new();
            for (side, (right, name)) in SIDES.into_iter().enumerate() {
                let vals: Vec<(f64, f64, f64, f64)> = grids[side]
                    .iter()
                    .map(|&(lam, d, dd)| {
                        if right {
                            let (t, tt) = discriminant(&st, 2.0 - lam / s);
                            (t, d, -tt / s, dd)
                        } else {
                            let (t, tt) = discriminant(&st, -2.0 + lam / s);
                            (sign * t, d, sign * tt / s, dd)
                        }
                    })
                    .collect();
                if let Some((c, r)) = worst(vals.iter().map(|v| (v.0, v.1))) {
                    rows.push(ReportRow::new(format!("discriminant_{name}"), n, 0, c, r));
                }
                if let Some((c, r)) = worst(vals.iter().map(|v| (v.2, v.3))) {
                    rows.push(ReportRow::new(format!("discriminant_deriv_{name}"), n, 0, c, r));
                }
            }
            Ok(rows)
        })?;
        for (_, name) in SIDES {
            rep.assert_trend(&format!("discriminant_{name}"), 0, self.config.tol.trend_floor);
            rep.assert_trend(&format!("discriminant_deriv_{name}"), 0, self.config.tol.trend_floor);
        }
        Ok(rep.finish())
    }

    /// `8N^2 I_n` and `J_n` at both edges for `n <= L`, the bulk size
    /// `max N^2 min(n, N-n) I_n` over `M < n < N - M`, and the gap between the
    /// two action formulas.
    pub fn actions(&self) -> Result<ConvergenceReport> {
        let eta = self.config.eta_action;
        let mut rep = self.per_n(|n| {
            let st = self.state(n)?;
            let sp = eigenvalues_q(&st)?;
            let a = actions_arcosh(&st, &sp)?;
            let b = actions_moment(&st, &sp)?;
            let (m, l) = edge_widths(n, eta);
            let s = 8.0 * (n * n) as f64;
            let mut rows = Vec::new();
            for (right, name) in SIDES {
                let hill = &self.limits.side(right).actions;
                for i in 1..=l.min(hill.i.len()) {
                    let idx = if right { n - i } else { i };
                    rows.push(ReportRow::new(format!("actions_{name}"), n, i, s * a.action(idx), hill.i[i - 1]));
                    rows.push(ReportRow::new(format!("actions_j_{name}"), n, i, a.quotient(idx), hill.j[i - 1]));
                }
            }
            let nn = (n * n) as f64;
            if let Some((c, r)) = worst((m + 1..n - m).map(|i| (nn * i.min(n - i) as f64 * a.action(i), 0.0))) {
                rows.push(ReportRow::new("actions_bulk", n, 0, c, r));
            }
            if let Some((c, r)) = worst((1..n).map(|i| (a.action(i), b.action(i)))) {
                rows.push(ReportRow::new("actions_cross", n, 0, c, r));
            }
            Ok(rows)
        })?;
        let tol = &self.config.tol;
        let (_, l0) = edge_widths(self.config.n_min(), eta);
        for (_, name) in SIDES {
            for i in 1..=l0 {
                rep.assert_trend(&format!("actions_{name}"), i, tol.trend_floor);
                rep.assert_trend(&format!("actions_j_{name}"), i, tol.trend_floor);
            }
            rep.assert_rel_at(&format!("actions_{name}"), self.config.n_top(), 1, tol.action_rel);
        }
        rep.assert_trend("actions_bulk", 0, tol.trend_floor);
        rep.assert_abs_all("actions_cross", 0, tol.action_cross);
        Ok(rep.finish())
    }

    /// Edge frequencies against the KdV reference for `n <= L` (both as a
    /// residual and rescaled by `-24 (2N)^3`), the bulk ratio to
    /// `2 sin(n pi / N)`, the near-edge constant for `L < n <= M`, and the
    /// agreement of the two frequency formulas.
    pub fn frequencies(&self) -> Result<ConvergenceReport> {
        let eta = self.config.eta_freq;
        let mut rep = self.per_n(|n| {
            let run = TodaRun::compute(self.state(n)?)?;
            let wb = frequencies_via_bands(&run.state, &run.spectrum, &run.basis, &run.actions)?;
            let (m, l) = edge_widths(n, eta);
            let nf = n as f64;
            let scale = -24.0 * (2.0 * nf).powi(3);
            let mut rows = Vec::new();
            for (right, name) in SIDES {
                let kdv = &self.limits.side(right).frequencies;
                for i in 1..=l.min(kdv.len()) {
                    let w = run.basis.omega(if right { n - i } else { i });
                    rows.push(ReportRow::new(format!("freq_hkdv_{name}"), n, i, w, hkdv_reference(n, i, kdv[i - 1])));
                    rows.push(ReportRow::new(format!("freq_{name}"), n, i, scale * (w - 2.0 * PI * i as f64 / nf), kdv[i - 1]));
                }
            }
            let ratio = |i: usize| run.basis.omega(i) / (2.0 * (i as f64 * PI / nf).sin());
            if let Some((c, r)) = worst((m + 1..n - m).map(|i| (ratio(i), 1.0))) {
                rows.push(ReportRow::new("freq_bulk", n, 0, c, r));
            }
            rows.push(ReportRow::new("freq_mid", n, 0, ratio(n / 2), 1.0));
            let near = (l + 1..=m.min(n - 1))
                .map(|i| (run.basis.omega(i) - 2.0 * PI * i as f64 / nf).abs() * (nf / i as f64).powi(3))
                .fold(None, |a: Option<f64>, v| Some(a.map_or(v, |a| a.max(v))));
            if let Some(v) = near {
                rows.push(ReportRow::new("freq_near_edge", n, 0, v, 0.0));
            }
            if let Some((c, r)) = worst(run.basis.freq.iter().copied().zip(wb.iter().copied())) {
                rows.push(ReportRow::new("freq_cross", n, 0, c, r));
            }
            Ok(rows)
        })?;
        let tol = &self.config.tol;
        let (_, l0) = edge_widths(self.config.n_min(), eta);
        let top = self.config.n_top();
        for (_, name) in SIDES {
            for i in 1..=l0 {
                rep.assert_trend(&format!("freq_hkdv_{name}"), i, tol.trend_floor);
                rep.assert_trend(&format!("freq_{name}"), i, tol.trend_floor);
            }
            rep.assert_rel_at(&format!("freq_{name}"), top, 1, tol.freq_rel);
        }
        rep.assert_trend("freq_bulk", 0, tol.trend_floor);
        rep.assert_trend("freq_mid", 0, tol.trend_floor);
        if let Some(r) = rep.row("freq_mid", top, 0) {
            let e = r.abs_err;
            rep.assert("freq_mid", 0, e < tol.bulk_freq, format!("abs_err {e:e} at N = {top} against {:e}", tol.bulk_freq));
        }
        let near: Vec<f64> = rep.group("freq_near_edge", 0).iter().map(|r| r.computed).collect();
        if near.len() >= 2 {
            let (lo, hi) = near.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
            let ok = hi.is_finite() && hi <= tol.near_edge_spread * lo.max(tol.trend_floor);
            rep.assert("freq_near_edge", 0, ok, format!("constant ranges over [{lo:e}, {hi:e}]"));
        }
        rep.assert_rel_all("freq_cross", 0, tol.freq_cross);
        Ok(rep.finish())
    }

    /// `4N^2(sigma^{N,k}_l + 2)` against the Hill zeros `sigma^{-,k}_l` and the
    /// mirrored right edge for `1 <= k, l <= max(L, 2)`, `k != l`. The check
    /// name carries `l`, the row index is `k`. Pairs whose Hill reference does
    /// not exist (closed gap `k` with open gap `l`) are left out.
    pub fn zeros(&self) -> Result<ConvergenceReport> {
        let eta = self.config.eta_freq;
        let mut rep = self.per_n(|n| {
            let run = TodaRun::compute(self.state(n)?)?;
            let (_, l) = edge_widths(n, eta);
            let r = l.max(2).min(n / 2 - 1);
            let s = 4.0 * (n * n) as f64;
            let mut rows = Vec::new();
            for (right, name) in SIDES {
                let kdv = self.limits.side(right);
                for k in 1..=r {
                    for ell in (1..=r).filter(|&e| e != k) {
                        let Some(reference) = hill_sigma(kdv, k, ell) else { continue };
                        let c = if right {
                            s * (2.0 - run.basis.sigma(n - k, n - ell).expect("k != l"))
                        } else {
                            s * (run.basis.sigma(k, ell).expect("k != l") + 2.0)
                        };
                        rows.push(ReportRow::new(format!("zeros_{name}_l{ell}"), n, k, c, reference));
                    }
                }
            }
            Ok(rows)
        })?;
        let groups: Vec<(String, usize)> = {
            let mut g: Vec<(String, usize)> = rep.rows.iter().map(|r| (r.check.clone(), r.n)).collect();
            g.sort();
            g.dedup();
            g
        };
        let count = self.config.n_list.len();
        for (check, k) in groups {
            if rep.group(&check, k).len() == count {
                rep.assert_trend(&check, k, self.config.tol.trend_floor);
            }
        }
        Ok(rep.finish())
    }

    /// The reflection identities at every `N` of the sweep.
    pub fn symmetry(&self) -> Result<ConvergenceReport> {
        let mut rep = ConvergenceReport::default();
        let parts: Vec<ConvergenceReport> =
            self.config.n_list.par_iter().map(|&n| verify_symmetry_with(&self.state(n)?, &self.config.tol)).collect::<Result<_>>()?;
        for p in parts {
            rep.append(p);
        }
        Ok(rep.finish())
    }

    /// All checks in the order spectrum, discriminant, actions, frequencies,
    /// zeros, symmetry.
    pub fn all(&self) -> Result<ConvergenceReport> {
        let mut rep = self.spectrum()?;
        rep.append(self.discriminant()?);
        rep.append(self.actions()?);
        rep.append(self.frequencies()?);
        rep.append(self.zeros()?);
        rep.append(self.symmetry()?);
        Ok(rep)
    }
}

/// `sigma^{k}_l` of the Hill differential `psi_k`; on a closed gap `l` the
/// zero is the double eigenvalue whatever `k` is.
fn hill_sigma(kdv: &KdvData, k: usize, l: usize) -> Option<f64> {
    if kdv.spectrum.is_closed(l) {
        return Some(kdv.spectrum.tau(l));
    }
    kdv.psi(k).and_then(|p| p.sigma(l))
}

pub fn verify_spectrum(config: &SweepConfig) -> Result<ConvergenceReport> {
    Sweep::new(config.clone())?.spectrum()
}

pub fn verify_discriminant(config: &SweepConfig) -> Result<ConvergenceReport> {
    Sweep::new(config.clone())?.discriminant()
}

pub fn verify_actions(config: &SweepConfig) -> Result<ConvergenceReport> {
    Sweep::new(config.clone())?.actions()
}

pub fn verify_frequencies(config: &SweepConfig) -> Result<ConvergenceReport> {
    Sweep::new(config.clone())?.frequencies()
}

pub fn verify_zeros(config: &SweepConfig) -> Result<ConvergenceReport> {
    Sweep::new(config.clone())?.zeros()
}

/// Reflection identities of one chain with default tolerances.
pub fn verify_symmetry(state: &TodaState) -> Result<ConvergenceReport> {
    Ok(verify_symmetry_with(state, &Tolerances::default())?.finish())
}

/// Compares `state` with its reflection: eigenvalues `lambda~_n = -lambda_{2N-1-n}`,
/// `Delta~(mu) = (-1)^N Delta(-mu)`, `I~_n = I_{N-n}`,
/// `phi~_n(mu) = (-1)^N phi_{N-n}(-mu)` (scaled by the sup of `phi_{N-n}` on the
/// grid) and `omega~_n = omega_{N-n}`. One row per identity, the worst case.
pub fn verify_symmetry_with(state: &TodaState, tol: &Tolerances) -> Result<ConvergenceReport> {
    const GRID: usize = 100;
    let n = state.len();
    let (a, b) = rayon::join(|| TodaRun::compute(state.clone()), || TodaRun::compute(state.reflect()));
    let (a, b) = (a?, b?);
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let la = a.spectrum.lambda();
    let lb = b.spectrum.lambda();
    // inside the spectrum |Delta| stays near 2, so absolute errors are meaningful
    let (lo, hi) = (la[0], la[2 * n - 1]);
    let grid: Vec<f64> = (0..=GRID).map(|i| lo + (hi - lo) * i as f64 / GRID as f64).collect();
    let mut rows = Vec::new();

    let eig = worst((0..2 * n).map(|i| (lb[i], -la[2 * n - 1 - i]))).expect("non-empty");
    rows.push(ReportRow::new("sym_eigenvalues", n, 0, eig.0, eig.1));

    let disc = worst(grid.iter().map(|&mu| (discriminant(&b.state, mu).0, sign * discriminant(&a.state, -mu).0))).expect("grid");
    rows.push(ReportRow::new("sym_discriminant", n, 0, disc.0, disc.1));

    let act = worst((1..n).map(|i| (b.actions.action(i), a.actions.action(n - i)))).expect("N > 1");
    rows.push(ReportRow::new("sym_actions", n, 0, act.0, act.1));

    let phi = (1..n)
        .filter_map(|i| {
            let sup = grid.iter().map(|&mu| a.basis.phi(n - i, -mu).abs()).fold(0.0, f64::max);
            worst(grid.iter().map(|&mu| (b.basis.phi(i, mu) / sup, sign * a.basis.phi(n - i, -mu) / sup)))
        })
        .fold(None, |acc: Option<(f64, f64)>, p| worst(acc.into_iter().chain(std::iter::once(p))));
    if let Some(p) = phi {
        rows.push(ReportRow::new("sym_phi", n, 0, p.0, p.1));
    }

    let om = worst((1..n).map(|i| (b.basis.omega(i), a.basis.omega(n - i)))).expect("N > 1");
    rows.push(ReportRow::new("sym_frequencies", n, 0, om.0, om.1));

    let mut rep = ConvergenceReport { rows, assertions: Vec::new() };
    for check in ["sym_eigenvalues", "sym_discriminant", "sym_actions", "sym_phi", "sym_frequencies"] {
        if !rep.group(check, 0).is_empty() {
            rep.assert_abs_all(check, 0, tol.symmetry);
        }
    }
    Ok(rep)
}
