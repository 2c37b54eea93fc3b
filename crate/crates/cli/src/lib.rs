//! Configuration-driven verification suites over the algebra and lattice
//! crates, with JSON and CSV reports.

pub mod config;
pub mod plot;
pub mod report;
pub mod suites;

pub use config::{ConfigError, SuiteConfig};
pub use report::{Case, Semantics, Status, SuiteReport};
pub use suites::{list_suites, run_suite, Criterion, SuiteInfo, SuiteRun, CRITERIA};
