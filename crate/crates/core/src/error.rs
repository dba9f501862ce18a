//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A speed value fell outside the admissible interval of a density family.
    #[error("Q = {q} outside the domain {domain} of the {family} density")]
    Domain {
        family: String,
        domain: String,
        q: f64,
    },

    /// Same as [`Error::Domain`], located at a grid vertex or cell.
    #[error("Q = {q} at {location} outside the domain {domain} of the {family} density")]
    DomainAt {
        family: String,
        domain: String,
        q: f64,
        location: String,
    },

    #[error("invalid density parameters: {0}")]
    Parameter(String),

    #[error("degree error: {0}")]
    Degree(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("duality violated: {0}")]
    Duality(String),

    #[error("linear solver failure: {0}")]
    LinearSolver(String),

    #[error("invalid problem: {0}")]
    Problem(String),
}
