use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unstable oscillator: lam = {lam} MHz reaches the critical amplitude {lambda_crit} MHz")]
    Unstable { lam: f64, lambda_crit: f64 },

    #[error("outside the Bogoliubov regime: need 0 <= lam < |delta_a| (lam = {lam}, delta_a = {delta_a})")]
    NotBogoliubov { lam: f64, delta_a: f64 },

    #[error("resonant denominator: {0}")]
    Resonance(String),

    #[error("frequency grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("Fock truncation {n_fock} too small for estimated occupation {occupation:.3}; use n_fock >= {suggested}")]
    TruncationTooSmall {
        n_fock: usize,
        occupation: f64,
        suggested: usize,
    },

    #[error("unstable dynamics: {0}")]
    UnstableDynamics(String),

    #[error("ambiguous coherence sector: best overlap {best:.3}, runner-up {second:.3}")]
    AmbiguousSector { best: f64, second: f64 },

    #[error("degenerate fit input: {0}")]
    Degenerate(String),

    #[error("rank-deficient fit: {0}")]
    RankDeficient(String),

    #[error("fit did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input rather than a numerical failure.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::Unstable { .. }
                | Error::NotBogoliubov { .. }
                | Error::Parse { .. }
                | Error::Json(_)
                | Error::TruncationTooSmall { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
