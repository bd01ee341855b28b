//! Configuration, sweeps and validation for the `cavstat` command.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod run;
pub mod validate;

pub use config::{ConfigError, SweepConfig};
pub use run::{run_point, run_sweep, ResultRow};
pub use validate::{run_validate, CriterionReport, Level};
