use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("chain length must be at least 2, got {0}")]
    ChainTooShort(usize),
    #[error("parameter {name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("inverse temperature must be non-negative, got {0}")]
    NegativeBeta(f64),
    #[error("angle {name} = {value} outside [{lo}, {hi}]")]
    AngleOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("spin values must be +1 or -1, got {0}")]
    InvalidSpin(i8),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("site index {index} outside 1..={sites}")]
    SiteOutOfRange { index: usize, sites: usize },
    #[error("site indices must be strictly increasing and distinct: {0:?}")]
    SitesNotOrdered(Vec<usize>),
    #[error("site list must not be empty")]
    EmptySites,
    #[error("enumeration refused: {sites} sites exceeds cap of {cap}")]
    EnumerationRefused { sites: usize, cap: usize },
    #[error("enumeration cap must lie in 2..=30, got {0}")]
    InvalidCap(usize),
    #[error("quadrature node count must lie in 1..=64, got {0}")]
    InvalidNodeCount(usize),
    #[error("extraction needs at least 2 quadrature nodes, got {0}")]
    RuleTooCoarse(usize),
    #[error("pair distance must be at least 1")]
    ZeroDistance,
}

pub type Result<T> = std::result::Result<T, Error>;
