use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    InvalidInput(String),
    /// A sequence arm has fewer subjects than the estimator needs.
    EmptyArm { arm: u8, count: usize, required: usize },
    /// A Gram or covariance matrix is singular or too badly conditioned to invert.
    SingularCovariance(String),
    /// An iterative fit did not reach its tolerance, or the data are separated.
    NonConvergence { iterations: usize, detail: String },
    /// A calibration target is not a probability strictly inside (0, 1).
    TargetOutOfRange { target: f64 },
    /// A test statistic would divide by a zero standard error.
    DegenerateVariance,
    /// The requested design cannot detect the effect, or the formula is undefined.
    InfeasibleDesign(String),
    /// The requested correlation is outside the attainable range for the two margins.
    InfeasibleCorrelation { rho: f64, lower: f64, upper: f64 },
    /// A failure inside one Monte Carlo replication.
    Replication { index: u64, source: Box<Error> },
}

impl Error {
    /// Stable identifier suitable for machine-readable reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::EmptyArm { .. } => "EmptyArm",
            Error::SingularCovariance(_) => "SingularCovariance",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::TargetOutOfRange { .. } => "TargetOutOfRange",
            Error::DegenerateVariance => "DegenerateVariance",
            Error::InfeasibleDesign(_) => "InfeasibleDesign",
            Error::InfeasibleCorrelation { .. } => "InfeasibleCorrelation",
            Error::Replication { source, .. } => source.code(),
        }
    }

    /// Innermost error, with replication wrappers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Replication { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::EmptyArm { arm, count, required } => write!(
                f,
                "arm {arm} has {count} subject(s), at least {required} required"
            ),
            Error::SingularCovariance(msg) => write!(f, "singular covariance: {msg}"),
            Error::NonConvergence { iterations, detail } => {
                write!(f, "no convergence after {iterations} iteration(s): {detail}")
            }
            Error::TargetOutOfRange { target } => {
                write!(f, "calibration target {target} is not in (0, 1)")
            }
            Error::DegenerateVariance => f.write_str("standard error is zero"),
            Error::InfeasibleDesign(msg) => write!(f, "infeasible design: {msg}"),
            Error::InfeasibleCorrelation { rho, lower, upper } => write!(
                f,
                "correlation {rho} outside the feasible interval ({lower}, {upper})"
            ),
            Error::Replication { index, source } => write!(f, "replication {index}: {source}"),
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::Replication { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}
