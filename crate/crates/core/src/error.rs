use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Domain errors. Index tuples in messages are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected} entries for m={m}, n={n}, got {got}")]
    Shape {
        m: usize,
        n: usize,
        expected: usize,
        got: usize,
    },

    #[error("dimensions must be positive (m={m}, n={n})")]
    EmptyDimension { m: usize, n: usize },

    #[error("non-finite value at position {position}")]
    NonFinite { position: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix factor is not symmetric: |M[{row}][{col}] - M[{col}][{row}]| = {gap:e}")]
    AsymmetricFactor { row: usize, col: usize, gap: f64 },

    #[error("denominator {value:e} vanishes at index ({i},{j},{k},{l})")]
    VanishingDenominator {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        value: f64,
    },

    #[error("pair sum {value:e} vanishes for generating vector `{vector}` at ({first},{second})")]
    VanishingPairSum {
        vector: &'static str,
        first: usize,
        second: usize,
        value: f64,
    },

    #[error(
        "positivity condition c_i + d_j > 0 fails at (i={i}, j={j}): c_i + d_j = {value:e}; \
         the Cauchy tensor is neither completely positive nor strictly copositive"
    )]
    CauchyConditionViolated { i: usize, j: usize, value: f64 },

    #[error("Pascal tensor {m}x{n} exceeds exact integer range (largest entry needs more than 53 bits)")]
    PascalTooLarge { m: usize, n: usize },

    #[error("{0}")]
    InvalidParameter(String),

    #[error("flattening is indefinite: minimum eigenvalue {min_eigenvalue:e} is below -{tol:e}")]
    Indefinite { min_eigenvalue: f64, tol: f64 },

    #[error("symmetric eigen-solver did not converge ({context})")]
    EigenNonConvergence { context: &'static str },

    #[error("decomposition is empty")]
    EmptyDecomposition,

    #[error("negative component {value:e} in factor {index} (1-based)")]
    NegativeFactor { index: usize, value: f64 },

    #[error("nonneg flag is {claimed} but the vectors say {actual}")]
    InconsistentNonnegFlag { claimed: bool, actual: bool },

    #[error("decomposition does not reproduce the tensor: max abs error {max_abs_error:e} > {tol:e}")]
    ReconstructionMismatch { max_abs_error: f64, tol: f64 },

    #[error("quadrature did not reach tolerance {tol:e} within {panels} panels; best error {best_error:e}")]
    ToleranceNotReached {
        tol: f64,
        best_error: f64,
        panels: usize,
    },

    #[error("pairing {value:e} < -1e-12 for sample {index}: CPB/copositive duality violated")]
    DualityViolation { index: usize, value: f64 },

    #[error("malformed document: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code: 2 for I/O and format errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Format(_) | Self::Io(_) => 2,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Self::Format(e.to_string())
    }
}
