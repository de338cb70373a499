use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not invertible (determinant is 0)")]
    NotInvertible,
    #[error("exact entries reached {digits} digits, above the budget of {budget}; lower the iteration range")]
    Overflow { digits: usize, budget: usize },
    #[error("the group Θ is positive dimensional, so the plain limit along an unspecified subsequence is undefined")]
    ThetaNotResolved,
    #[error("the cone is not preserved: the image of generator {generator} leaves the cone")]
    ConeNotPreserved { generator: usize },
    #[error("the spectral radius is not a dominant eigenvalue (falsification of the cone hypothesis)")]
    NoDominantRealEigenvalue,
    #[error("determinant {det} is not a unit of Z[i]")]
    NotUnitDeterminant { det: String },
    #[error("the word of involutions is empty")]
    EmptyWord,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("pullback does not respect the cup product: {0}")]
    CupIncompatible(String),
    #[error("this operation needs cup-product structure constants")]
    CupMissing,
    #[error("the class is not an eigenclass for the given eigenvalue (residual {residual})")]
    NotEigenclass { residual: String },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("the function is constant on the grid")]
    DegenerateFunction,
    #[error("the first dynamical degree is 1; nothing to normalize")]
    NoExpansion,
    #[error("a frequency vector is zero (constant character)")]
    ZeroFrequency,
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError { line: usize, column: usize, message: String },
    #[error("invalid configuration: {0}")]
    ValidationError(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotInvertible => "NotInvertible",
            Error::Overflow { .. } => "Overflow",
            Error::ThetaNotResolved => "ThetaNotResolved",
            Error::ConeNotPreserved { .. } => "ConeNotPreserved",
            Error::NoDominantRealEigenvalue => "NoDominantRealEigenvalue",
            Error::NotUnitDeterminant { .. } => "NotUnitDeterminant",
            Error::EmptyWord => "EmptyWord",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::CupIncompatible(_) => "CupIncompatible",
            Error::CupMissing => "CupMissing",
            Error::NotEigenclass { .. } => "NotEigenclass",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::DegenerateFunction => "DegenerateFunction",
            Error::NoExpansion => "NoExpansion",
            Error::ZeroFrequency => "ZeroFrequency",
            Error::ParseError { .. } => "ParseError",
            Error::ValidationError(_) => "ValidationError",
            Error::Invalid(_) => "Invalid",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
