use thiserror::Error;

/// Errors produced by the factorizations, solvers and experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Jacobi SVD did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("requested matrix of {entries} entries exceeds the size cap of {cap}")]
    SizeOverflow { entries: usize, cap: usize },

    #[error("problem is not generic: gap {gap:e} <= tolerance {tolerance:e}")]
    NonGeneric { gap: f64, tolerance: f64 },

    #[error("|v22| = {value:e} is below the degeneracy tolerance")]
    DegenerateV22 { value: f64 },

    #[error("||v22|| = {value:e} for truncation k = {k}; truncated solution undefined")]
    NonGenericTruncation { k: usize, value: f64 },

    #[error("sketch has only {available} singular values above the floor, {required} required")]
    RankCollapse { available: usize, required: usize },

    #[error("adaptive range finder reached the basis cap of {max_basis} before the tolerance was met")]
    BasisExhausted { max_basis: usize },

    #[error("TLS solution is zero; relative bounds are undefined")]
    ZeroSolution,

    #[error("residual is zero; condition number formula is undefined")]
    ZeroResidual,

    #[error("closed forms disagree: {0}")]
    FormulaMismatch(String),

    #[error("unknown test problem `{0}`")]
    UnknownProblem(String),

    #[error("bad problem size: {0}")]
    BadSize(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for I/O and input-format failures, as opposed to numerical ones.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Parse { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
