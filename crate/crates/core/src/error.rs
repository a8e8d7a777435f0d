use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is singular (ad - bc = 0)")]
    SingularMatrix,
    #[error("map is the identity within tolerance")]
    IdentityMap,
    #[error("rotation axis endpoints coincide")]
    DegenerateAxis,
    #[error("fixed points of the generators are not in general position")]
    DegenerateAxes,
    #[error("two of the four points coincide")]
    DegenerateConfiguration,
    #[error("root finder did not converge after {iterations} iterations")]
    NoConvergence {
        iterations: usize,
        partial: Vec<Complex64>,
    },
    #[error("input point is infinite")]
    InfiniteInput,
    #[error("polynomial has degree zero")]
    ConstantPolynomial,
    #[error("numerator and denominator share a root near {0}")]
    CommonRoot(Complex64),
    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),
    #[error("two candidate preimages are within {separation:e} of each other")]
    BranchAmbiguity { separation: f64 },
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("invalid group word: {0}")]
    InvalidWord(String),
    #[error("not a valid correspondence: {0}")]
    InvalidCorrespondence(String),
    #[error("filled Julia set appears disconnected")]
    Disconnected,
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
