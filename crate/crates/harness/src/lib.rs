//! Instance generation, statistical tests, experiment suites and reports.

pub mod experiment;
pub mod instance;
pub mod report;
pub mod stats;

pub use experiment::{run_experiment, ExperimentError, ExperimentKind, ExperimentSpec};
pub use instance::{gen_instance, Instance, TargetMode};
pub use report::{ReportRecord, Summary, Tolerance};
