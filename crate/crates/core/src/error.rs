use thiserror::Error;

/// Errors across the whole workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |A - A†| entry {0:.3e})")]
    NonHermitian(f64),

    #[error("matrix is not unitary (max |U†U - I| entry {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is not square: {0}x{1}")]
    NonSquare(usize, usize),

    #[error("dimension {0} exceeds the cap of {1}")]
    DimensionTooLarge(usize, usize),

    #[error("composite dimension {0} would exceed the cap of {1}")]
    ResultTooLarge(usize, usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("iteration did not converge after {0} steps")]
    NoConvergence(usize),

    #[error("invalid Pauli character {0:?} (expected one of I, X, Y, Z)")]
    BadCharacter(char),

    #[error("Pauli string length {got} does not match {expected} qubits")]
    LengthMismatch { expected: usize, got: usize },

    #[error("qubit count mismatch: {0}")]
    QubitCountMismatch(String),

    #[error("malformed Hamiltonian spec: {0}")]
    ParseError(String),

    #[error("term norm {0} exceeds the 1/2 cap (set \"rescale\": true to scale the whole sum)")]
    NormViolation(f64),

    #[error("empty encoding list")]
    EmptyList,

    #[error("all combination weights are zero")]
    ZeroWeights,

    #[error("encoded block is not Hermitian (defect {0:.3e})")]
    BlockNotHermitian(f64),

    #[error("empty Chebyshev series")]
    EmptySeries,

    #[error("polynomial exceeds 1 on [-1,1] (grid max {0:.6})")]
    PolynomialTooLarge(f64),

    #[error("operator norm {0} exceeds 1")]
    NormTooLarge(f64),

    #[error("epsilon {0} outside the accepted range {1}")]
    EpsilonOutOfRange(f64, &'static str),

    #[error("argument out of range: {0}")]
    ArgumentOutOfRange(String),

    #[error("formula order k = {0} is too small (need k >= 2)")]
    KTooSmall(u32),

    #[error("commutator bound order p = {0} unsupported (need p in {{1, 2}} or a caller-supplied value)")]
    OrderUnsupported(u32),

    #[error("too many terms for nested commutator sum: m = {0} (cap 4)")]
    TooManyTerms(usize),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag, used by the CLI error reporting.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonHermitian(_) => "NonHermitian",
            Error::NotUnitary(_) => "NotUnitary",
            Error::NonSquare(..) => "NonSquare",
            Error::DimensionTooLarge(..) => "DimensionTooLarge",
            Error::ResultTooLarge(..) => "ResultTooLarge",
            Error::DimensionMismatch(..) => "DimensionMismatch",
            Error::NoConvergence(_) => "NoConvergence",
            Error::BadCharacter(_) => "BadCharacter",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::QubitCountMismatch(_) => "QubitCountMismatch",
            Error::ParseError(_) => "ParseError",
            Error::NormViolation(_) => "NormViolation",
            Error::EmptyList => "EmptyList",
            Error::ZeroWeights => "ZeroWeights",
            Error::BlockNotHermitian(_) => "BlockNotHermitian",
            Error::EmptySeries => "EmptySeries",
            Error::PolynomialTooLarge(_) => "PolynomialTooLarge",
            Error::NormTooLarge(_) => "NormTooLarge",
            Error::EpsilonOutOfRange(..) => "EpsilonOutOfRange",
            Error::ArgumentOutOfRange(_) => "ArgumentOutOfRange",
            Error::KTooSmall(_) => "KTooSmall",
            Error::OrderUnsupported(_) => "OrderUnsupported",
            Error::TooManyTerms(_) => "TooManyTerms",
            Error::Io(_) => "IoError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
