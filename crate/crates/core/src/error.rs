//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter is outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The Fock cutoff cannot hold the requested coherent amplitude with
    /// truncation leakage below the guaranteed bound.
    #[error(
        "cutoff {cutoff} too small for coherent amplitude {alpha}: \
         requires alpha^2 <= cutoff/4 and truncation leakage < 1e-8 (got {leakage:.3e})"
    )]
    CutoffTooSmall {
        alpha: f64,
        cutoff: usize,
        leakage: f64,
    },

    /// The post-selection overlap vanished, so the weak value is undefined.
    #[error("degenerate post-selection: |<f|i>| = {magnitude:.3e} < {threshold:.3e}")]
    DegeneratePostSelection { magnitude: f64, threshold: f64 },

    /// The Bayes normalizer vanished (no click probability mass anywhere).
    #[error("degenerate posterior normalizer: {0}")]
    DegenerateNormalizer(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error(
        "quadrature did not converge: value {value:.6e}, error estimate {error_estimate:.3e} \
         > tolerance {tolerance:.3e} after {intervals} intervals"
    )]
    QuadratureNonConvergent {
        value: f64,
        error_estimate: f64,
        tolerance: f64,
        intervals: usize,
    },

    /// Too few post-selected trials to form an estimate.
    #[error("insufficient post-selected statistics: {n_accepted} accepted trials, need >= {required}")]
    InsufficientStatistics { n_accepted: u64, required: u64 },

    /// All likelihood weights vanished; the weighted estimator is undefined.
    #[error("degenerate weights: sum of likelihood weights is zero")]
    DegenerateWeights,
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for precondition violations (bad parameter values), as opposed to
    /// numerical or statistical failures encountered during computation.
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::CutoffTooSmall { .. }
                | Error::DegeneratePostSelection { .. }
                | Error::DegenerateNormalizer(_)
        )
    }
}
