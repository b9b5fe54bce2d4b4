//! File formats, experiment configuration, the end-to-end experiment run
//! and reporting for the `plural-core` classifiers.
// `!(x > 0.0)` style checks are there to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod error;
pub mod experiment;
pub mod features;
pub mod lexicon;
pub mod model_io;
pub mod report;
pub mod synth;

pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use experiment::{run_experiment, Artifacts};
pub use features::{default_feature_table, load_feature_table};
pub use lexicon::{ingest, load_exclusions};
pub use model_io::ModelFile;
pub use report::{emit_frequency_table, emit_summary, write_outputs, Report};
