use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole: {0}")]
    Pole(String),
    #[error("series not expandable at X = 0")]
    NotExpandable,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("element is not p-integral: {0}")]
    NotIntegral(String),
    #[error("not a unipotent upper-triangular element")]
    NotUnipotent,
    #[error("level mismatch: {0}")]
    LevelMismatch(String),
    #[error("levels are not nested: {0} is not contained in {1}")]
    NotNested(String, String),
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("exhaustion check failed: {0}")]
    Exhaustion(String),
    #[error("eigenvalue is not simple: {0}")]
    Degenerate(String),
    #[error("recursion is underdetermined at height {0}")]
    Underdetermined(usize),
    #[error("incompatible characters: {0}")]
    IncompatibleCharacters(String),
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("hypothesis fails: {0}")]
    Hypothesis(String),
    #[error("root finder did not converge")]
    NoConvergence,
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("cache: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
