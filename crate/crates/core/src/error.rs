use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,
    #[error("nonfinite input")]
    NonFinite,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("weights must be strictly positive")]
    NonPositiveWeight,
    #[error("degenerate design")]
    DegenerateDesign,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported dimension {0}: only d = 2 is supported here")]
    UnsupportedDimension(usize),
    #[error("outside projected support")]
    OutsideSupport,
    #[error("asymptotic law unknown for the LSE")]
    UnknownAsymptotics,
    #[error("need reps ≥ 2 for covariance")]
    TooFewReplications,
    #[error("all replications failed")]
    AllReplicationsFailed,
}

impl Error {
    /// True for errors that stem from the data or model rather than from a malformed request.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::DegenerateDesign
                | Error::OutsideSupport
                | Error::UnknownAsymptotics
                | Error::AllReplicationsFailed
        )
    }
}
