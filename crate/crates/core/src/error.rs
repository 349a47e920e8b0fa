use thiserror::Error;

use crate::percolation::PercolationEstimate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The coarse scan reached `lambda_f_max` while the network still percolated.
    /// Carries every grid point evaluated so far.
    #[error("search exhausted: theta_hat > {epsilon} at lambda_f_max = {lambda_f_max}")]
    SearchExhausted {
        lambda_f_max: f64,
        epsilon: f64,
        evaluated: Vec<(f64, PercolationEstimate)>,
    },

    #[error("no devices in any of {trials} trials")]
    NoDevices { trials: usize },

    #[error("csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
