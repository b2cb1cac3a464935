use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate equity: share denominator is {0}")]
    DegenerateEquity(f64),

    #[error("liquidated region: marked collateral share {0} is not positive")]
    LiquidatedRegion(f64),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unresolvable quantile: {n_boot} resamples cannot resolve probability {eps}")]
    UnresolvableQuantile { n_boot: usize, eps: f64 },

    #[error("misaligned series: {0}")]
    Misaligned(String),

    #[error("mismatched control parameters: {0}")]
    MismatchedControl(String),

    #[error("empty input")]
    EmptyInput,

    #[error("schema violation: {0}")]
    Schema(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
