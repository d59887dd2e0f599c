//! Spectrally-corrected and regularized linear discriminant analysis (SRLDA)
//! for binary classification under a spiked covariance model.
//!
//! The crate provides:
//!
//! * dense symmetric linear algebra for pooled covariances ([`linalg`]),
//! * plug-in estimators for spiked-model parameters ([`spiked`]),
//! * closed-form deterministic misclassification surfaces ([`surface`]),
//! * grid-search tuning of the regularization weights ([`optimizer`]),
//! * the SRLDA / OI-SRLDA classifiers plus LDA and ridge-regularized LDA
//!   baselines ([`classifiers`]),
//! * a reproducible simulation and real-data benchmark harness
//!   ([`experiments`]),
//! * config-file driven CLI plumbing ([`config`], [`report`]).

pub mod classifiers;
pub mod config;
pub mod data;
mod error;
pub mod experiments;
pub mod linalg;
pub mod optimizer;
pub mod report;
pub mod spiked;
pub mod surface;

pub use data::Dataset;
pub use error::{Error, Result};

/// Crate version recorded in report metadata and serialized models.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
