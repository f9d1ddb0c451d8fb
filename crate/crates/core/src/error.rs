use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("number of differential variables must be at least 1")]
    ZeroVariables,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("variable index u{index} out of range for ell = {ell}")]
    VariableOutOfRange { index: usize, ell: usize },

    #[error("operator must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator is not skewadjoint")]
    NotSkewAdjoint,

    #[error("operator is not quasiconstant (coefficients must be rational constants)")]
    NotQuasiconstant,

    #[error("leading coefficient not invertible")]
    SingularLeadingCoefficient,

    #[error("array is not skewsymmetric")]
    NotSkewSymmetric,

    #[error("degree {0} is not supported here")]
    UnsupportedDegree(i32),

    #[error("malformed element: {0}")]
    Malformed(String),

    #[error("S must be nondegenerate")]
    DegenerateMatrix,

    #[error("matrix must be symmetric")]
    NotSymmetric,

    #[error("operators are not compatible")]
    Incompatible,

    #[error("seed is not a Casimir of K")]
    NotCasimir,

    #[error("action is not faithful")]
    NotFaithful,

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
}
