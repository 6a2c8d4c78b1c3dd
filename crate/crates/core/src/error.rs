//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures raised by ring, module and suite operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial is not irreducible modulo p")]
    NotIrreducible,
    #[error("defining polynomial is not separable modulo p")]
    NonSeparable,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("invalid ring parameters: {0}")]
    BadRing(String),
    #[error("polynomial is not Eisenstein: {0}")]
    NotEisenstein(String),
    #[error("element is not divisible")]
    NotDivisible,
    #[error("insufficient p-adic precision: have {have}, need {need}")]
    InsufficientPrecision { have: u32, need: u32 },
    #[error("precision loss: exact result of degree {degree} exceeds u-precision {prec}")]
    PrecisionLoss { degree: usize, prec: usize },
    #[error("element is not in the filtration step {0}")]
    NotInFiltration(usize),
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("kill exponent not certified below the u-precision: {0}")]
    PrecisionTooLow(String),
    #[error("fixed-point dimension not attained up to extension degree {0}")]
    BoundTooSmall(usize),
    #[error("module is not killed by p")]
    NotKilledByP,
    #[error("not a Fontaine-Laffaille module: {0}")]
    NotFL(String),
    #[error("module has u-torsion")]
    HasUTorsion,
    #[error("bad ramification data: {0}")]
    BadRamification(String),
    #[error("kernel solutions reach the boundary band; raise the degree bound")]
    BoundaryContamination,
    #[error("value changed under truncation refinement: {0}")]
    Unstable(String),
    #[error("phi does not preserve relation {0}")]
    IllFormedPhi(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    ParseError { line: usize, col: usize, msg: String },
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
