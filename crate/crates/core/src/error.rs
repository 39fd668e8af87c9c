use thiserror::Error;

/// Errors raised anywhere in the harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Array shapes or grids that do not agree.
    #[error("structural error: {0}")]
    Structural(String),
    /// Bad input data (non-finite samples, empty families, ...).
    #[error("input error: {0}")]
    Input(String),
    /// Parameters that violate a documented constraint.
    #[error("configuration error: {0}")]
    Config(String),
    /// The time integrator left the healthy regime.
    #[error(
        "divergence at t = {t}: max |u| = {max_abs:e} (last healthy frame t = {last_healthy_t})"
    )]
    Divergence {
        t: f64,
        max_abs: f64,
        last_healthy_t: f64,
    },
    /// The Picard map failed to converge within its iteration budget.
    #[error("Picard iteration did not converge in {iterations} iterations (last contraction ratio {last_ratio:.4})")]
    NonContraction { iterations: usize, last_ratio: f64 },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
