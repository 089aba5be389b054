//! Experiment harness: configuration, Monte Carlo driver, exact oracle and
//! CSV output.

pub mod config;
pub mod exec;
pub mod oracle;
pub mod results;
pub mod run;
pub mod streams;

pub use config::{ExperimentConfig, Family, Regeneration};
pub use exec::{Execution, THREADS_ENV};
pub use oracle::{exact_error_oracle, oracle_term_count, ORACLE_MAX_TERMS};
pub use results::{emit_csv, read_csv, write_csv, ResultRow};
pub use run::{run_experiment, run_model};
