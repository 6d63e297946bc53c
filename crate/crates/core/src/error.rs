use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite parameter `{0}`")]
    NonFinite(&'static str),
    #[error("q = {q} outside the admissible range (2, {critical})")]
    QOutOfRange { q: f64, critical: f64 },
    #[error("lambda = {lambda} must exceed -H_s = {bound}")]
    LambdaBelowHardy { lambda: f64, bound: f64 },
    #[error("n = {n} is not k*m with k = {k}, m = {m}")]
    BadFactorization { n: usize, k: usize, m: usize },
    #[error("c_hat must be given explicitly for n = {n}, s = {s}")]
    CHatUnjustified { n: usize, s: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("eigenvalue mu = {0} must be positive")]
    MuNonpositive(f64),
    #[error("degree zero gives the constant eigenfunction (mu = 0)")]
    EllZeroRejected,
    #[error("the full orthogonal group admits no mean-zero invariant eigenfunction")]
    FullGroupRejected,
    #[error("group not supported: {0}")]
    UnsupportedGroup(String),
    #[error("perturbation factor is undefined at the origin")]
    OriginEvaluation,
    #[error("insufficient decay at the grid ends (relative tail {tail:.3e})")]
    TruncationError { tail: f64 },
    #[error("profile oscillates beyond the grid resolution (spectral tail {tail:.3e})")]
    ResolutionError { tail: f64 },
    #[error("integral diverges at the origin: a*p = {ap} >= n = {n}")]
    SingularIntegralError { ap: f64, n: usize },
    #[error("the zero function has no energy quotient")]
    ZeroFunction,
    #[error("field takes negative values (relative minimum {0:.3e})")]
    NegativeValues(f64),
    #[error("y-truncation residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    YTruncationError { residual: f64, tolerance: f64 },
    #[error("grid too coarse near the origin: {0}")]
    GridResolutionError(String),
    #[error("partition mismatch: n = {n} but k*m = {km}")]
    PartitionMismatch { n: usize, km: usize },
    #[error("source function is not radially symmetric")]
    NonRadialSource,
    #[error("input is not a converged minimizer (residual {residual:.3e} > {tolerance:.3e})")]
    UnconvergedInput { residual: f64, tolerance: f64 },
    #[error("minimization did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("initial guess is identically zero")]
    DegenerateStart,
    #[error("energy fraction {fraction:.3e} in the highest retained mode exceeds 1e-6")]
    ModeTruncationError { fraction: f64 },
    #[error("every certificate in the sweep was inconclusive")]
    SweepInconclusive,
    #[error("sector minimizer collapsed to a radial function")]
    RadialCollapse,
    #[error("incompatible fields: {0}")]
    Incompatible(String),
    #[error("io: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
