//! Scenario files, reports and the command line around `invarprob-core`.
//!
//! The core crate does the mathematics; this crate parses the text forms
//! of sets, points and generators ([`literal`]), runs scenario files
//! ([`scenario`]), renders reports ([`report`]) and assembles the existence
//! table ([`table`]).

pub mod literal;
pub mod report;
pub mod scenario;
pub mod table;

pub use invarprob_core as core;
pub use report::{Outcome, Report, Status};
pub use scenario::{bundled, run_scenario, RunOptions, Scenario, ScenarioError};
pub use table::{run_table, TableReport};
