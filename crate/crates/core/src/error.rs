use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("tensor dimensions must be positive, got {0:?}")]
    EmptyDimension([usize; 3]),

    #[error("index ({}, {}, {}) out of range for dims {dims:?}", .index[0] + 1, .index[1] + 1, .index[2] + 1)]
    IndexOutOfRange { index: [usize; 3], dims: [usize; 3] },

    #[error("duplicate entry at ({}, {}, {})", .0[0] + 1, .0[1] + 1, .0[2] + 1)]
    DuplicateEntry([usize; 3]),

    #[error("non-finite entry at ({}, {}, {})", .0[0] + 1, .0[1] + 1, .0[2] + 1)]
    NonFinite([usize; 3]),

    #[error("the zero tensor has no moment map")]
    ZeroTensor,

    #[error("matrix {0} of the triple is not invertible")]
    NotInvertible(usize),

    #[error("matrix {0} of the triple is not unitary (deviation {1:e})")]
    NotUnitary(usize, f64),

    #[error("component {0} is not Hermitian (deviation {1:e})")]
    NotHermitian(usize, f64),

    #[error("invalid Weyl chamber point: {0}")]
    InvalidWeylPoint(String),

    #[error("format size n = {n} is below the minimum {min}")]
    InvalidSize { n: usize, min: usize },

    #[error("support is not free: ({}, {}, {}) and ({}, {}, {}) differ in one coordinate",
        .0[0] + 1, .0[1] + 1, .0[2] + 1, .1[0] + 1, .1[1] + 1, .1[2] + 1)]
    NonFreeSupport([usize; 3], [usize; 3]),

    #[error("entry ({}, {}, {}) lies outside the staircase support", .0[0] + 1, .0[1] + 1, .0[2] + 1)]
    SupportEscapesGamma([usize; 3]),

    #[error("a-entry {} vanishes", .0 + 1)]
    ZeroAEntry(usize),

    #[error("deleting row {} of W leaves a rank-deficient matrix (relative sigma_min {:e})", .0 + 1, .1)]
    RankDeficient(usize, f64),

    #[error("diagonal normalization is inconsistent (residual {0:e})")]
    InconsistentScaling(f64),

    #[error("expected diagonal components (off-diagonal magnitude {0:e})")]
    NotDiagonal(f64),

    #[error("block must contain exactly two indices, got {0}")]
    BlockSize(usize),

    #[error("invalid input: {0}")]
    Format(String),
}
