use thiserror::Error;

use crate::instance::NodeId;
use crate::solution::Solution;

/// Which single constraint a split procedure was driving.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitConstraint {
    Duration,
    Range,
}

impl std::fmt::Display for SplitConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SplitConstraint::Duration => f.write_str("duration limit"),
            SplitConstraint::Range => f.write_str("driving range"),
        }
    }
}

/// Location-aware diagnostic from the instance or solution parsers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("malformed solution: {0}")]
    MalformedSolution(String),

    #[error("customer {customer} cannot be placed on its own route under the {constraint}")]
    Unsplittable { customer: NodeId, constraint: SplitConstraint },

    #[error("invalid move: {0}")]
    InvalidMove(String),

    #[error("population is empty")]
    EmptyPopulation,

    #[error("instance is infeasible: {0}")]
    InfeasibleInstance(String),

    #[error("no feasible solution was found")]
    NoFeasibleSolution { least_violating: Option<Box<Solution>> },

    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),

    #[error("unknown instance profile `{0}`")]
    UnknownProfile(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}
