use thiserror::Error;

/// Errors produced by estimators, optimizers and data plumbing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// No block mean lies within `delta / sqrt(n)` of the robust estimate,
    /// so the gradient denominator is zero. Usually `delta` is too small.
    #[error("degenerate gradient{}: no active blocks at delta = {delta:e}", fmt_iteration(.iteration))]
    DegenerateGradient {
        iteration: Option<usize>,
        delta: f64,
    },

    /// Losses or coefficients became non-finite, usually from too large a step.
    #[error("iterates diverged at iteration {iteration}; try a smaller step size")]
    Diverged { iteration: usize },

    #[error("linear system is singular: {0}")]
    Singular(String),

    #[error("run {run} failed: {source}")]
    RunFailed {
        run: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

fn fmt_iteration(iteration: &Option<usize>) -> String {
    match iteration {
        Some(t) => format!(" at iteration {t}"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
