use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("{what}: expected dimension {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("frame of size k*p = {k}*{p} does not fit in dimension {n}")]
    FrameTooLarge { k: usize, p: usize, n: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("columns are not orthonormal (defect {defect:.3e})")]
    NotOrthonormal { defect: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot orthonormalize an empty list of vectors")]
    EmptyInput,

    #[error("hermitian eigensolver did not converge")]
    EigenNoConvergence,

    #[error("target tuple is not in the rank-({k}:{p}) range")]
    NotMember { k: usize, p: usize },

    #[error("witness construction failed: {0}")]
    Construction(String),

    #[error("tuple is not commuting (max commutator norm {defect:.3e})")]
    NotCommuting { defect: f64 },

    #[error("{count} subsets exceed the enumeration limit of {limit}")]
    TooManySubsets { count: u128, limit: u128 },

    #[error("search budget of {budget} candidates exhausted")]
    BudgetExceeded { budget: usize },

    #[error("n = {n} lies outside the window [{lo}, {hi})")]
    OutsideWindow { n: usize, lo: usize, hi: usize },

    #[error("kraus operators are not trace preserving (defect {defect:.3e})")]
    ChannelDefect { defect: f64 },

    #[error("unknown channel `{0}`")]
    UnknownChannel(String),

    #[error("probabilities must be nonnegative and sum to 1 (sum {sum})")]
    Probabilities { sum: f64 },

    #[error("{0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
