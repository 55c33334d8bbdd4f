//! Command-line front end: argument model, command dispatch and the
//! property battery behind `verify-suite`.

mod config;
mod run;
pub mod suite;

pub use config::{Command, KindArg, RunConfig, SubspacePair};
pub use run::{run, Outcome, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};
pub use suite::{parse_dims, verify_suite, AnchorResult, SuiteReport};
