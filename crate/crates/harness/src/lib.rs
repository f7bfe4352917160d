//! Experiment harness for the momentum-dynamics crates: decay-rate fitting,
//! named experiments with deterministic CSV output and manifests, figure
//! presets, and the `mbo` command-line interface built on top.

pub mod config;
pub mod csvio;
pub mod error;
pub mod experiments;
pub mod figures;
pub mod fit;

pub use config::{ExperimentConfig, RunMode};
pub use csvio::Manifest;
pub use error::HarnessError;
pub use experiments::{parse_state, run_experiment};
pub use figures::emit_figure_data;
pub use fit::{fit_rate, RateFit};
