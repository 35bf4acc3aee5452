use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),

    #[error("rank {n} exceeds the permutation-sum guard of {max}")]
    RankTooLarge { n: usize, max: usize },

    #[error("{size}x{size} matrix exceeds the exact determinant cap of {cap}")]
    MatrixTooLarge { size: usize, cap: usize },

    #[error("matrix is not square")]
    NotSquare,

    #[error("matrix entries mix cyclotomic orders {0} and {1}")]
    MixedOrder(usize, usize),

    #[error("invalid stratum: {0}")]
    InvalidStratum(String),

    #[error("unbounded index set: {0}")]
    UnboundedIndexSet(String),

    #[error("invalid label: {0}")]
    InvalidLabel(String),

    #[error("non-integer result: raw {raw}, residual {residual} exceeds tolerance {tolerance}")]
    NonInteger {
        raw: f64,
        residual: f64,
        tolerance: f64,
    },

    #[error("incompatible summand dimensions at p = {p}: {detail}")]
    IncompatibleDims { p: usize, detail: String },

    #[error("singular restricted block while solving for p = {0}")]
    SingularBlock(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
