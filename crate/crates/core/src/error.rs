//! Error type shared by all operators.

/// Failures reported by the SLDG operators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("gauss rule size {0} outside 1..=16")]
    RuleSize(usize),
    #[error("invalid mesh: {0}")]
    InvalidMesh(&'static str),
    #[error("non-finite value in cell {cell}")]
    NonFinite { cell: usize },
    #[error("point {x} lies outside the domain and no boundary extension was supplied")]
    OutOfDomain { x: f64 },
    #[error("fields do not share mesh and degree")]
    LayoutMismatch,
    #[error("empty linear combination")]
    EmptyCombination,
    #[error("characteristic map not invertible: {bound} = {value:.4} exceeds {limit:.4}")]
    NotInvertible {
        bound: &'static str,
        value: f64,
        limit: f64,
    },
    #[error("no sign change around {z}: map is not monotone")]
    NotMonotone { z: f64 },
    #[error("subinterval of cell {cell} does not map into a single cell")]
    Breakpoint { cell: usize },
    #[error("second-order source correction needs f_t, f_x and f_xx")]
    MissingDerivatives,
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
