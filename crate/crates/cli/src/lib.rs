//! Scenario runner for the zero-area pulse simulations: configuration files,
//! CSV emitters and the verbs behind the `zapsim` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod run;

pub use config::{ConfigError, PresetSelection, ScenarioConfig};
pub use run::{run, threads_from_env, RunError, RunReport, Verb};
