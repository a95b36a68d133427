use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point {re} + {im}i is not strictly inside the unit disk")]
    OutsideDisk { re: f64, im: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no single-mode bosonic realization for k = {0} (only 1/4 and 3/4)")]
    UnsupportedRealization(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("no zero of the overlap found below |δ| = {limit}")]
    NoZeroFound { limit: f64 },

    #[error("no closed contour encloses the origin")]
    NoEnclosingContour,

    #[error("ray at angle {theta} does not cross the contour")]
    NoIntersection { theta: f64 },

    #[error("Fock cutoff would exceed the cap of {cap}")]
    CutoffExceeded { cap: usize },

    #[error("oracle did not converge: {0}")]
    Convergence(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
