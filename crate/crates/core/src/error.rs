use thiserror::Error;

/// Errors raised by ssdkit operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("form matrix is not symmetric (max |S_ij - S_ji| = {asymmetry:e})")]
    AsymmetricForm { asymmetry: f64 },

    #[error("form has spectral norm {norm} > 1; |<b,c>| <= |b||c| fails")]
    NotBanach { norm: f64 },

    #[error("operation needs a Banach SSD space (spectral norm of the form <= 1)")]
    NotBanachSpace,

    #[error("dual form has spectral norm {norm} > 1; p~ is not available")]
    NotBanachDual { norm: f64 },

    #[error("form matrix is singular or ill-conditioned (condition number {cond:e})")]
    SingularForm { cond: f64 },

    #[error("no dual structure attached")]
    NoDualStructure,

    #[error("point set is empty")]
    EmptySet,

    #[error("extracted coincidence set P_q(f) is empty")]
    EmptyPqSet,

    #[error("search grid is empty")]
    EmptySearchGrid,

    #[error("point {point:?} is not a node of the grid")]
    OffGridPoint { point: Vec<f64> },

    #[error("quadratic has a singular Hessian; conjugate has no closed form")]
    DegenerateQuadratic,

    #[error("function is not proper: {0}")]
    Improper(String),

    #[error("f < q at {witness:?}: f - q = {gap:e}")]
    FBelowQ { witness: Vec<f64>, gap: f64 },

    #[error("linear program failed: {0}")]
    LpNumericalFailure(String),

    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
