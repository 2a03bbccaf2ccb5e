//! Files, benchmark generators, the exhaustive oracle and run reports.

mod format;
mod generate;
mod oracle;
mod report;

pub use format::{parse_instance, parse_solution, write_instance, write_solution};
pub use generate::{generate_instance, Profile};
pub use oracle::{oracle_solve, OracleResult};
pub use report::{bks_table, write_report, BksTable, Report, RunRecord};
