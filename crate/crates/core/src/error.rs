use thiserror::Error;

use crate::netdsl::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("entry count {len} is not a square of a positive dimension")]
    NotSquare { len: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("invalid placement: {0}")]
    InvalidPlacement(String),

    #[error("invalid qubit permutation: {0}")]
    InvalidPermutation(String),

    #[error("matrix is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("gate kind {0} is composite and cannot be evaluated in lowered mode")]
    CompositeInLowered(String),

    #[error("cannot lower {0} onto replicas of the base gate")]
    NotLowerable(String),

    #[error(
        "target (alpha = {target_alpha}, theta = {target_theta}) is unreachable within eps = {eps} \
         for n <= {n_max} (best err {best_err} at n = {best_n})"
    )]
    Unreachable {
        target_alpha: f64,
        target_theta: f64,
        eps: f64,
        n_max: u64,
        best_n: u64,
        best_err: f64,
    },

    #[error("unknown construction `{0}`")]
    UnknownConstruction(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}
