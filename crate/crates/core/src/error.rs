use thiserror::Error;

use crate::exactnum::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("invalid rational {0:?} (expected \"p/q\" or an integer)")]
    Rational(String),
    #[error("scenario: {0}")]
    Scenario(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("tail mass must be non-negative, got {0}")]
    NegativeMass(Rational),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WorldError {
    #[error("invalid population: {0}")]
    Population(String),
    #[error("invalid world: {0}")]
    World(String),
    #[error("alignment: {0}")]
    Alignment(String),
    #[error("unsupported tail combination: {0}")]
    UnsupportedTailCombination(String),
    #[error("invalid weights: {0}")]
    Weight(String),
    #[error("invalid flow: {0}")]
    Flow(String),
    #[error("illegal restricted transfer: {0}")]
    Transfer(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("domain: {0}")]
    Domain(String),
    #[error("not refutable: {0}")]
    NotRefutable(String),
    #[error("unknown replay {0:?}")]
    UnknownReplay(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
