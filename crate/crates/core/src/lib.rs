//! Crop recommendation from environmental and economic records.
//!
//! The pipeline runs ingestion and cleaning ([`dataset`]), exploratory
//! statistics ([`eda`]), temporal ordering, lag features and encoding
//! ([`features`]), from-scratch random forest and SVM learners
//! ([`learners`]), and the three evaluation protocols with their metric
//! suite ([`evaluation`]).

pub mod config;
pub mod dataset;
pub mod eda;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod learners;
pub mod recommend;
pub mod seed;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
