use std::fmt;

/// Error type shared by the whole library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    Domain(String),
    /// Evaluation requested at (or too close to) a pole.
    Pole {
        location: f64,
        residue: f64,
        context: String,
    },
    /// Truncation or iteration budget exhausted before the tolerance was met.
    /// Carries the best value and bound obtained so far.
    Resource {
        context: String,
        best_value: f64,
        best_bound: f64,
    },
    /// Least-squares fit not trustworthy (conditioning or residual).
    Fit(String),
    /// A hard internal identity check failed. This signals an implementation
    /// bug, not a bad input.
    IdentityGate {
        context: String,
        left: f64,
        right: f64,
        tol: f64,
    },
    /// Finite-difference oracle disagreed with itself across Richardson levels.
    OracleUnstable { context: String, spread: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 domain, 3 resource/convergence,
    /// 4 identity-gate failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Pole { .. } => 2,
            Error::Resource { .. } | Error::Fit(_) | Error::OracleUnstable { .. } => 3,
            Error::IdentityGate { .. } => 4,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Pole {
                location,
                residue,
                context,
            } => write!(
                f,
                "pole at {location} (residue {residue}) encountered in {context}"
            ),
            Error::Resource {
                context,
                best_value,
                best_bound,
            } => write!(
                f,
                "budget exhausted in {context}: best value {best_value}, bound {best_bound}"
            ),
            Error::Fit(msg) => write!(f, "fit error: {msg}"),
            Error::IdentityGate {
                context,
                left,
                right,
                tol,
            } => write!(
                f,
                "identity check failed in {context}: {left} vs {right} (tol {tol})"
            ),
            Error::OracleUnstable { context, spread } => {
                write!(f, "finite-difference oracle unstable in {context}: spread {spread}")
            }
        }
    }
}

impl std::error::Error for Error {}
