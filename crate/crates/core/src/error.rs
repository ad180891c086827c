use thiserror::Error;

/// Errors produced by the optimization and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("demanded rate unachievable at any transmit power: {0}")]
    Infeasible(String),

    #[error("value out of representable range: {0}")]
    OutOfRange(String),

    #[error("per-antenna power rho_r must be positive: inner minimum is zero only in the limit M -> infinity")]
    ZeroAntennaPower,

    #[error("optimum may lie at K -> infinity: rho_d = 0 requires an explicit k_max")]
    UnboundedSearch,

    #[error("no feasible (M, K) within the search bounds")]
    NoFeasiblePoint,

    #[error("bound hypotheses unmet: R = {rate} must exceed max(R1, R2) = {threshold}")]
    HypothesesUnmet { rate: f64, threshold: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite_nonneg(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and non-negative",
        });
    }
    Ok(())
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        });
    }
    Ok(())
}
