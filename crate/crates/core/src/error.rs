use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument was outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions before reaching tolerance.
    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    /// Root finding could not bracket or converge.
    #[error("root finding failed: {0}")]
    Bracket(String),

    /// Bracket expansion for phi^-1 exceeded 1e300.
    #[error("potential appears bounded: inverse bracket expansion exceeded 1e300 at y = {0}")]
    UnboundedInverse(f64),

    /// Degenerate least-squares / envelope fit.
    #[error("fit error: {0}")]
    Fit(String),

    /// Config file could not be parsed or failed validation.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
