use std::path::PathBuf;

/// Failures raised by the numerical pipeline and the command line front end.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("chain needs at least 3 particles, got {0}")]
    TooFewParticles(usize),
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("a_{n} = {value} is not positive (profile too large for this N)")]
    NonPositiveA { n: usize, value: f64 },
    #[error("flow step rejected at t = {t}: a_{n} = {value}")]
    StepRejected { t: f64, n: usize, value: f64 },
    #[error("invalid step parameters: dt = {dt}, t_final = {t_final}")]
    InvalidStep { dt: f64, t_final: f64 },
    #[error("could not isolate root {n}: {detail}")]
    BracketFailure { n: usize, detail: String },
    #[error("mu = {mu} lies within {eps:e} of the periodic eigenvalue lambda_{j}")]
    OnSpectrumBoundary { mu: f64, j: usize, eps: f64 },
    #[error("gap {0} is closed")]
    ClosedGap(usize),
    #[error("quadrature did not converge within {max_nodes} nodes")]
    NoConvergence { max_nodes: usize },
    #[error("period matrix is singular for differential {n} (condition estimate {cond:e})")]
    SingularPeriodMatrix { n: usize, cond: f64 },
    #[error("zero of phi_{n} not isolated in gap {k}")]
    RootCountMismatch { n: usize, k: usize },
    #[error("linear system for the frequencies is singular")]
    SingularSystem,
    #[error("arcosh argument {value} < 1 on gap {n}")]
    NegativeArcoshArgument { n: usize, value: f64 },
    #[error("Newton iteration for the zeros of psi_{n} diverged after {iterations} steps")]
    NewtonDivergence { n: usize, iterations: usize },
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("rate fit needs at least 3 distinct N values, got {0}")]
    InsufficientData(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
