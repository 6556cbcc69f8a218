use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("shape mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("matrix is not Hermitian: max |m_ij - conj(m_ji)| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    #[error("trace is not one: |tr - 1| = {deviation:.3e}")]
    TraceNotOne { deviation: f64 },
    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },
    #[error("invalid dimension {dim}: need at least {min}")]
    InvalidDimension { dim: usize, min: usize },
    #[error("invalid rank {rank} for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("coupling strength {g} out of range: need sin g and cos(g/2) away from zero with 0 < g < pi")]
    StrengthOutOfRange { g: f64 },
    #[error("pointer observables built at g = {observables} but device ensemble at g = {ensemble}")]
    StrengthMismatch { ensemble: f64, observables: f64 },
    #[error("weak value W[{n}][{j}] is undefined (post-selection probability {prob:.3e}) but carries weight")]
    UndefinedWeakValue { n: usize, j: usize, prob: f64 },
    #[error("negative outcome probability {prob:.3e} beyond clamping slack")]
    NegativeProbability { prob: f64 },
    #[error("incomplete statistics: configuration (n = {n}, {quadrature}) has {got} shots, expected {expected}")]
    IncompleteStats {
        n: usize,
        quadrature: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("repetition count must be at least 1")]
    ZeroRepetitions,
    #[error("state file line {line}: {message}")]
    Parse { line: usize, message: String },
}
