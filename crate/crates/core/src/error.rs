use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("rows have different lengths")]
    Ragged,
    #[error("tolerance must be a nonnegative number, got {0}")]
    InvalidTolerance(f64),
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("multimatrix algebra needs at least one block")]
    EmptyBlocks,
    #[error("algebra has no multimatrix presentation")]
    NoPresentation,
    #[error("group needs cyclic orders >= 2, got {0:?}")]
    InvalidGroup(Vec<usize>),
    #[error("element {0:?} is not in the group")]
    NotInGroup(Vec<usize>),
    #[error("cocycle table entry ({0}, {1}) has modulus {2}, expected 1")]
    NotUnitModulus(usize, usize, f64),
    #[error("cocycle identity fails with residual {0:e}")]
    InvalidCocycle(f64),
    #[error("objects live over different groups")]
    GroupMismatch,
    #[error("projective representation check failed with residual {0:e}")]
    InvalidRepresentation(f64),
    #[error("algebra is twisted; no canonical factor basis")]
    TwistedInput,
    #[error("map is not covariant (residual {0:e})")]
    NotCovariant(f64),
    #[error("map is not a channel (cp min eigenvalue {min_eigenvalue:e}, counit residual {counit:e})")]
    NotChannel { min_eigenvalue: f64, counit: f64 },
    #[error("channel is not weakly symmetric")]
    NotWeaklySymmetric,
    #[error("invalid stochastic matrix: {0}")]
    NotStochastic(String),
    #[error("maps are not composable")]
    NotComposable,
    #[error("map does not act on the given {0} algebra")]
    AlgebraMismatch(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
}
