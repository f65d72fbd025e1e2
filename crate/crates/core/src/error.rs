use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Composite quadrature failed to settle before the panel limit.
    #[error("quadrature did not converge on [{lo}, {hi}] after {panels} panels (last change {change:e})")]
    NonConvergence {
        lo: f64,
        hi: f64,
        panels: usize,
        change: f64,
    },

    /// `gamma - beta_es * (1 - gamma) <= 0`: the eavesdropper SINR can never
    /// reach `beta_es`, so the scaling factor is undefined.
    #[error("artificial-noise ceiling: gamma={gamma} cannot reach beta_es={beta_es}")]
    AnCeiling { gamma: f64, beta_es: f64 },

    /// A numerically computed probability left [0, 1] by more than the
    /// rounding slack.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Configuration document does not match the schema.
    #[error("config schema error: {0}")]
    Schema(String),

    /// Configuration parsed but violates an invariant.
    #[error("invalid config: {field}: {message}")]
    Invalid { field: String, message: String },

    #[error("unknown sweep parameter `{0}`")]
    UnknownParameter(String),

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for failures caused by the numerics rather than by user input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::Numerical(_))
    }
}
