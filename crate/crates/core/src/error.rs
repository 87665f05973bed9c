use thiserror::Error;

use crate::sim::QubitLabel;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NonUnitary(f64),

    #[error("qubit {0} is not part of the register")]
    QubitNotInRegister(QubitLabel),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("non-physical map: {0}")]
    NonPhysical(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("fit failure: {0}")]
    FitDegenerate(String),

    #[error("matrix logarithm undefined: {0}")]
    LogBranch(String),

    #[error("fiducial frame is rank deficient (rank {rank}, need {needed})")]
    RankDeficient { rank: usize, needed: usize },

    #[error("negative count {count} for {circuit}")]
    NegativeCounts { circuit: String, count: i64 },

    #[error("sampled a zero-probability branch (p = {0:.3e})")]
    ZeroProbabilityBranch(f64),

    #[error("spec invariant violated: {0}")]
    SpecMismatch(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by user-supplied configuration rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::SpecMismatch(_) | Error::InvalidArgument(_) | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
