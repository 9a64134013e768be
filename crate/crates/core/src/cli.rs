//! Command line front end: JSON run configuration, subcommand dispatch and
//! CSV/JSON report output.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::abelian_differentials::frequencies_via_bands;
use crate::error::{Error, Result};
use crate::harness::{
    ConvergenceReport, ReportRow, Sweep, SweepConfig, Tolerances, TodaRun, DEFAULT_ETA_ACTION, DEFAULT_ETA_FREQ, DEFAULT_N_LIST,
};
use crate::hill_kdv::{hill_eigenvalues, KdvData, DEFAULT_K, DEFAULT_K_SIGMA, DEFAULT_N_MAX};
use crate::jacobi_spectral::{eigenvalues_l, eigenvalues_q};
use crate::toda_actions::{actions_arcosh, actions_moment};
use crate::toda_model::{discretize, evolve_lax, potentials, FourierProfile};

pub const CSV_HEADER: &str = "check,N,n,computed,reference,abs_err,rel_err,slope";
pub const THREADS_ENV: &str = "TODA_SPECTRA_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// `[k, cos_coeff, sin_coeff]` triples.
type Terms = Vec<(usize, f64, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    #[serde(default)]
    pub alpha: Terms,
    #[serde(default)]
    pub beta: Terms,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig { alpha: vec![(1, 1.0, 0.0)], beta: vec![(1, 0.0, 1.0)] }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// The JSON run configuration. Every key is optional; unknown keys are errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub profile: ProfileConfig,
    #[serde(rename = "N_list")]
    pub n_list: Vec<usize>,
    pub eta_freq: f64,
    pub eta_action: f64,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "K_sigma")]
    pub k_sigma: usize,
    pub n_max: usize,
    pub tolerances: Tolerances,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            profile: ProfileConfig::default(),
            n_list: DEFAULT_N_LIST.to_vec(),
            eta_freq: DEFAULT_ETA_FREQ,
            eta_action: DEFAULT_ETA_ACTION,
            k: DEFAULT_K,
            k_sigma: DEFAULT_K_SIGMA,
            n_max: DEFAULT_N_MAX,
            tolerances: Tolerances::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e.to_string().trim_start_matches("invalid configuration: "))))
    }

    pub fn profiles(&self) -> Result<(FourierProfile, FourierProfile)> {
        let check = |terms: &Terms, name: &str| -> Result<FourierProfile> {
            if terms.iter().any(|t| t.0 == 0) {
                return Err(Error::Config(format!("profile.{name}: harmonic k = 0 is not allowed (profiles have mean zero)")));
            }
            FourierProfile::from_terms(terms).map_err(|e| Error::Config(format!("profile.{name}: {e}")))
        };
        Ok((check(&self.profile.alpha, "alpha")?, check(&self.profile.beta, "beta")?))
    }

    pub fn sweep(&self) -> Result<SweepConfig> {
        let (alpha, beta) = self.profiles()?;
        let c = SweepConfig {
            alpha,
            beta,
            n_list: self.n_list.clone(),
            eta_freq: self.eta_freq,
            eta_action: self.eta_action,
            k: self.k,
            k_sigma: self.k_sigma,
            n_max: self.n_max,
            tol: self.tolerances.clone(),
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Parser)]
#[command(name = "toda-spectra", version, about = "Spectral data of periodic Toda chains and their Hill/KdV edge limits")]
struct Cli {
    /// JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default: the configured path, else stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Single particle count replacing N_list
    #[arg(long = "N", global = true)]
    big_n: Option<usize>,
    /// Global tolerance override
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Periodic eigenvalues of Q_N
    Spectrum,
    /// Toda actions from the arcosh formula, against the moment formula
    TodaActions,
    /// Toda frequencies from the normalized differentials, against the band-integral system
    TodaFreqs,
    /// Periodic spectra of the two edge Hill operators
    Hill,
    /// KdV actions and frequencies of the two edge potentials
    Kdv,
    /// Eigenvalue drift along the Lax flow
    Flow {
        #[arg(long, default_value_t = 10.0)]
        t_final: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
    },
    /// Convergence checks
    Verify {
        #[arg(value_enum)]
        target: Target,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Spectrum,
    Discriminant,
    Actions,
    Frequencies,
    Zeros,
    Symmetry,
    All,
}

/// Runs the command line and returns the process exit code: 0 on success,
/// 1 if a check failed or the computation broke down, 2 on input errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return 2;
    }
    let (config, format, out) = match resolve(&cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let report = match execute(&cli.command, &config) {
        Ok(r) => r,
        Err(e @ (Error::Config(_) | Error::Io { .. })) => {
            eprintln!("error: {e}");
            return 2;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if let Err(e) = emit(&report, format, out.as_deref()) {
        eprintln!("error: {e}");
        return 2;
    }
    for a in report.failures() {
        eprintln!("FAIL {} n={}: {}", a.check, a.n, a.detail);
    }
    if report.passed() {
        0
    } else {
        1
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| Error::Config(format!("{THREADS_ENV} = {v:?} is not a non-negative integer")))?;
    // a second initialization (e.g. repeated calls in one process) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn resolve(cli: &Cli) -> Result<(RunConfig, Format, Option<PathBuf>)> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.big_n {
        config.n_list = vec![n];
    }
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Config(format!("--tol {t} must be positive")));
        }
        config.tolerances.override_all(t);
    }
    config.sweep()?;
    let format = cli.format.unwrap_or(config.output.format);
    let out = cli.out.clone().or_else(|| config.output.path.clone());
    Ok((config, format, out))
}

fn execute(command: &Command, config: &RunConfig) -> Result<ConvergenceReport> {
    let sweep = config.sweep()?;
    let (alpha, beta) = (&sweep.alpha, &sweep.beta);
    let mut rows = Vec::new();
    match command {
        Command::Spectrum => {
            for &n in &sweep.n_list {
                let sp = eigenvalues_q(&discretize(alpha, beta, n)?)?;
                for (i, &l) in sp.lambda().iter().enumerate() {
                    let eq = -2.0 * (i.div_ceil(2) as f64 * std::f64::consts::PI / n as f64).cos();
                    rows.push(ReportRow::new("eigenvalue", n, i, l, eq));
                }
            }
        }
        Command::TodaActions => {
            for &n in &sweep.n_list {
                let st = discretize(alpha, beta, n)?;
                let sp = eigenvalues_q(&st)?;
                let (a, b) = (actions_arcosh(&st, &sp)?, actions_moment(&st, &sp)?);
                for i in 1..n {
                    rows.push(ReportRow::new("action", n, i, a.action(i), b.action(i)));
                }
            }
        }
        Command::TodaFreqs => {
            for &n in &sweep.n_list {
                let run = TodaRun::compute(discretize(alpha, beta, n)?)?;
                let wb = frequencies_via_bands(&run.state, &run.spectrum, &run.basis, &run.actions)?;
                for i in 1..n {
                    rows.push(ReportRow::new("frequency", n, i, run.basis.omega(i), wb[i - 1]));
                }
            }
        }
        Command::Hill => {
            let (qm, qp) = potentials(alpha, beta);
            for (name, q) in [("hill_minus", qm), ("hill_plus", qp)] {
                let sp = hill_eigenvalues(&q, sweep.k)?;
                for (i, &l) in sp.lambda().iter().enumerate() {
                    let free = 4.0 * std::f64::consts::PI.powi(2) * (i.div_ceil(2) as f64).powi(2);
                    rows.push(ReportRow::new(name, 0, i, l, free));
                }
            }
        }
        Command::Kdv => {
            let (qm, qp) = potentials(alpha, beta);
            for (side, q) in [("minus", qm), ("plus", qp)] {
                let d = KdvData::compute(&q, sweep.k, sweep.k_sigma, sweep.n_max)?;
                for (i, &v) in d.actions.i.iter().enumerate() {
                    rows.push(ReportRow::new(format!("kdv_action_{side}"), 0, i + 1, v, 0.0));
                }
                for (i, &w) in d.frequencies.iter().enumerate() {
                    let free = (4.0 * std::f64::consts::PI * (i + 1) as f64).powi(3);
                    rows.push(ReportRow::new(format!("kdv_frequency_{side}"), 0, i + 1, w, free));
                }
            }
        }
        Command::Flow { t_final, dt } => {
            for &n in &sweep.n_list {
                let st = discretize(alpha, beta, n)?;
                let start = eigenvalues_l(&eigenvalues_q(&st)?);
                let traj = evolve_lax(&st, *t_final, *dt, usize::MAX)?;
                let end_state = traj.states.last().expect("trajectory holds the final state");
                let end = eigenvalues_l(&eigenvalues_q(end_state)?);
                for (i, (e, s)) in end.iter().zip(&start).enumerate() {
                    rows.push(ReportRow::new("flow_eigenvalue", n, i, *e, *s));
                }
            }
        }
        Command::Verify { target } => {
            let sw = Sweep::new(sweep)?;
            return match target {
                Target::Spectrum => sw.spectrum(),
                Target::Discriminant => sw.discriminant(),
                Target::Actions => sw.actions(),
                Target::Frequencies => sw.frequencies(),
                Target::Zeros => sw.zeros(),
                Target::Symmetry => sw.symmetry(),
                Target::All => sw.all(),
            };
        }
    }
    Ok(ConvergenceReport { rows, assertions: Vec::new() })
}

fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// CSV text of a report; a trailing `status` column marks failing rows with
/// `FAIL` whenever any row failed.
pub fn to_csv(report: &ConvergenceReport) -> String {
    let flag = report.rows.iter().any(|r| r.fail) || !report.passed();
    let mut s = String::from(CSV_HEADER);
    if flag {
        s.push_str(",status");
    }
    s.push('\n');
    for r in &report.rows {
        let slope = r.slope.map(fmt_float).unwrap_or_default();
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.check,
            r.big_n,
            r.n,
            fmt_float(r.computed),
            fmt_float(r.reference),
            fmt_float(r.abs_err),
            fmt_float(r.rel_err),
            slope
        );
        if flag {
            s.push_str(if r.fail { ",FAIL" } else { "," });
        }
        s.push('\n');
    }
    s
}

pub fn to_json(report: &ConvergenceReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Writes the report to `path`, or to stdout when there is none.
pub fn emit(report: &ConvergenceReport, format: Format, path: Option<&Path>) -> Result<()> {
    let text = match format {
        Format::Csv => to_csv(report),
        Format::Json => to_json(report),
    };
    match path {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io { path: p.into(), source }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source }),
    }
}
