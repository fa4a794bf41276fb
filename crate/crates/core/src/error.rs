use thiserror::Error;

/// Errors raised by the modal solvers and the special-function layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid order {0}: must be a nonnegative integer or half-integer")]
    InvalidOrder(f64),

    #[error("argument r = {0} outside the domain (r must be positive)")]
    Domain(f64),

    #[error("invalid series truncation {0}")]
    InvalidTruncation(i64),

    #[error("near-zero denominator: the function of order {order} vanishes at r = {r}")]
    NearZeroDenominator { order: f64, r: f64 },

    #[error("precision unreachable: {0}")]
    PrecisionUnreachable(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "cut-off collision{}: lambda = {lambda} is within tolerance of k^2 = {k_squared}",
        .mode.map(|m| format!(" at mode {m}")).unwrap_or_default()
    )]
    Cutoff {
        mode: Option<usize>,
        lambda: f64,
        k_squared: f64,
    },

    #[error("mode {mode} is singular (determinant {determinant:.3e}); it belongs to the kernel")]
    SingularMode { mode: usize, determinant: f64 },

    #[error("fit unstable: {0}")]
    FitUnstable(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("{0} lies on the branch cut of the square root")]
    BranchCut(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("point outside the region of the stored coefficients: {0}")]
    RegionMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
