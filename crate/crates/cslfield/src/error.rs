use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// A formula left its domain of validity for the given parameters.
    #[error("parameter regime failure: {0}")]
    Regime(String),

    /// The oracle's truncated basis is too small for the requested evolution.
    #[error(
        "truncation tail {tail:.3e} exceeds {limit:.1e} at n_max = {n_max}; \
         rerun with n_max >= {hint}"
    )]
    Truncation { tail: f64, limit: f64, n_max: usize, hint: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { field, reason: reason.into() }
}

/// Reject NaN/inf and values failing `ok`.
pub(crate) fn check(field: &'static str, value: f64, ok: bool, what: &str) -> Result<()> {
    if !value.is_finite() {
        return Err(invalid(field, format!("must be finite, got {value}")));
    }
    if !ok {
        return Err(invalid(field, format!("must be {what}, got {value}")));
    }
    Ok(())
}
