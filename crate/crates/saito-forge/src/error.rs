//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("not divisible: {0}")]
    NotDivisible(String),
    #[error("linear system inconsistent: {0}")]
    Inconsistent(String),
    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),
    #[error("reducible group: {0}")]
    ReducibleGroup(String),
    #[error("polynomial is not invariant: {0}")]
    NotInvariant(String),
    #[error("semi-invariant projection vanished: {0}")]
    ZeroProjection(String),
    #[error("flatness violated: {0}")]
    FlatnessViolation(String),
    #[error("property violated: {0}")]
    PropertyViolation(String),
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("flat coordinate system not integrable: {0}")]
    NonIntegrable(String),
    #[error("twist endomorphism singular: {0}")]
    SingularTwist(String),
    #[error("e-multiplication endomorphism singular: {0}")]
    SingularP(String),
    #[error("multiplication endomorphism singular: {0}")]
    SingularU(String),
    #[error("pair is not regular: {0}")]
    NotRegular(String),
    #[error("structure is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("table mismatch: {0}")]
    TableMismatch(String),
    #[error("regularity failure on returned line: {0}")]
    RegularityFailure(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
