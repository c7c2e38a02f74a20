//! File formats, corpus loading, multi-threaded training and the experiment
//! harness around `folkmotif-core`.

pub mod config;
pub mod corpus;
pub mod error;
pub mod formats;
pub mod harness;
pub mod jsonl;
pub mod parallel;

pub use config::{ExperimentConfig, ModelKind};
pub use error::{Error, Stage};
