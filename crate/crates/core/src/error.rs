use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Sampled data does not match the grid it is supposed to live on.
    #[error("shape mismatch: expected {expected} samples, got {actual}")]
    Shape { expected: usize, actual: usize },

    /// The parallel offset folds over itself somewhere (`a0 * kappa >= 1`).
    #[error("offset self-intersects at s = {s}: a0*kappa = {strain}{}", alpha_suffix(.alpha))]
    SelfIntersect {
        s: f64,
        strain: f64,
        alpha: Option<f64>,
    },

    /// The tip sits on the y axis, so y(L)/x(L) is undefined.
    #[error("degenerate tip: |x(L)| = {x} is below the ratio threshold")]
    DegenerateTip { x: f64 },

    #[error("constraint rows are linearly dependent (rank {rank} < {expected})")]
    RankDeficient { rank: usize, expected: usize },

    #[error("no convergence after {iterations} iterations, residual {residual:e}")]
    NonConvergence { iterations: usize, residual: f64 },
}

fn alpha_suffix(alpha: &Option<f64>) -> String {
    match alpha {
        Some(a) => format!(" (alpha = {a})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Attach the sweep amplitude to a self-intersection error.
    pub fn with_alpha(self, alpha: f64) -> Self {
        match self {
            Error::SelfIntersect { s, strain, .. } => Error::SelfIntersect {
                s,
                strain,
                alpha: Some(alpha),
            },
            other => other,
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SelfIntersect { .. }
                | Error::DegenerateTip { .. }
                | Error::RankDeficient { .. }
                | Error::NonConvergence { .. }
        )
    }
}
