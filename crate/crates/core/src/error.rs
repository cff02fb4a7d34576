use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension {0}: need d >= 2")]
    InvalidDimension(usize),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
    #[error("polytope is unbounded: constraint normals have rank {rank} < {dim}")]
    Unbounded { rank: usize, dim: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("point is not a valid vertex: {0}")]
    InvalidVertex(String),
    #[error("not representable as a convex combination of the model states")]
    NotRepresentable,
    #[error("rotation is not a symmetry of the measurement directions")]
    NotASymmetry,
    #[error("contextuality witness not applicable: {0}")]
    WitnessNotApplicable(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
