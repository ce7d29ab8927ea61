use thiserror::Error;

/// Errors surfaced by pricing, oracle and calibration routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on user input failed (bad parameter, bad bracket, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An iterative routine ran out of its iteration budget.
    #[error("{routine} failed to converge: {detail}")]
    NoConvergence {
        routine: &'static str,
        detail: String,
    },

    /// A tensor-quadrature request would exceed the supported dimension or
    /// point budget.
    #[error("quadrature budget exceeded: {0}")]
    BudgetExceeded(String),

    /// A price lies outside the arbitrage bounds of the Black formula, so no
    /// implied volatility exists.
    #[error("price {price} outside arbitrage bounds [{lo}, {hi}]")]
    PriceOutOfBounds { price: f64, lo: f64, hi: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
