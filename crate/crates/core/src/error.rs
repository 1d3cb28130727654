use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("down-spin count n={down} is out of range for L={sites} sites")]
    SectorRange { sites: usize, down: usize },

    #[error("site count L={0} exceeds the enumeration cap of {cap} sites", cap = crate::hilbert::MAX_SITES)]
    TooManySites(usize),

    #[error("site {site} is outside the chain [1, {sites}]")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("anisotropy delta={0} is not in the easy-axis regime delta > 1")]
    InvalidAnisotropy(f64),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator dimension {dim} exceeds the dense cap {cap}; use lowest_k instead")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("Lanczos did not converge after {iterations} restarts; best residuals {residuals:?}")]
    NoConvergence { iterations: usize, residuals: Vec<f64> },

    #[error("span has rank {rank}, expected {expected}; Gram spectrum {gram_spectrum:?}")]
    RankDeficient {
        rank: usize,
        expected: usize,
        gram_spectrum: Vec<f64>,
    },

    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
