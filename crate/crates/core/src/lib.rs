//! Memetic search for the green vehicle routing problem with private
//! capacitated alternative fuel stations.
//!
//! The crate is organised around the evaluation model in [`eval`], which
//! every other part calls: [`split`] decodes giant tours into routes,
//! [`local_search`] improves solutions with incremental move evaluation,
//! [`population`] manages feasible and infeasible subpopulations, and
//! [`solver`] ties them together. [`io`] holds the instance format, the
//! benchmark generators, an exhaustive oracle for tiny instances and run
//! reporting.

pub mod error;
pub mod eval;
pub mod instance;
pub mod io;
pub mod local_search;
pub mod population;
pub mod solution;
pub mod solver;
pub mod split;

pub use error::{Error, ParseError};
pub use eval::{evaluate, EvalMode, EvalReport, PenaltyWeights};
pub use instance::{FleetParams, Instance, NodeId, DEPOT};
pub use solution::{GiantTour, Route, Solution};
pub use solver::{run, RunResult, SolverConfig};

#[cfg(test)]
mod testutil;
