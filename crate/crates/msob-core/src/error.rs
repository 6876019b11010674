use thiserror::Error;

/// Library-wide error type. Numerical routines never return a finite value
/// for an integral that diverges or a predicate that cannot be certified;
/// they return one of these instead.
#[derive(Error, Debug, Clone)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    /// Adaptive refinement exhausted its subdivision budget. Carries the best
    /// estimate and the achieved error bound so callers can decide.
    #[error("tolerance not met: estimate {estimate}, error bound {error_bound} ({context})")]
    ToleranceNotMet {
        estimate: f64,
        error_bound: f64,
        context: String,
    },

    /// Two independent methods disagree beyond the trust threshold.
    #[error("unreliable value: methods give {a} vs {b} (relative gap {rel_gap:.3e})")]
    UnreliableValue { a: f64, b: f64, rel_gap: f64 },

    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    /// Cross-checked closed forms disagree; signals a special-function bug,
    /// not a caller mistake.
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    /// Nonlinear fit did not converge; carries the best iterate found.
    #[error("fit failed after {iterations} iterations (residual {residual:.3e})")]
    FitFailure {
        iterations: usize,
        residual: f64,
        best: crate::bubble::Bubble,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
