//! Configuration, orchestration and serialization for the `solve` binary.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod records;
pub mod rng;
pub mod run;
pub mod sampling;

pub use config::{
    apply_env_overrides, parse_config, validate_config, ConfigError, Format, Mode, RunConfig,
};
pub use output::{render, Rendered};
pub use run::{run, RunError};
pub use sampling::generate_random_config;
