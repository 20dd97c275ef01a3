use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a precondition.
    #[error("invalid {field}: {reason}")]
    InvalidInput { field: &'static str, reason: String },

    /// Adaptive quadrature ran out of subdivisions. Carries the best estimate.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (best estimate {value:e}, error estimate {error_estimate:e})"
    )]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    /// An integrand returned NaN or an infinite value.
    #[error("integrand is not finite at abscissa {abscissa:e} (value {value})")]
    Domain { abscissa: f64, value: f64 },

    /// An iterative root solve exhausted its iteration budget.
    #[error("{solver} did not converge after {iterations} iterations (residual {residual:e})")]
    SolverNonConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("lambda = {lambda:e} is too close to the degenerate limit; use the limit energy instead")]
    LambdaOutOfRange { lambda: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            field,
            reason: reason.into(),
        }
    }

    /// True for failures of an iterative numerical method, as opposed to bad input.
    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::SolverNonConvergence { .. })
    }
}
