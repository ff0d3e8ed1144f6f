//! Empathy-seeker detection for social-media posts.
//!
//! The crate classifies posts as empathy-seeking (`ES`) or not (`NES`) and
//! replies as empathetic (`ER`) or not (`NER`). Features come from six verbal
//! families and three visual families; classification is a weighted blend of
//! logistic regression and a random forest.
//!
//! Module map:
//!
//! - [`corpus`]: record schema, validation, anonymization, agreement, folds,
//!   and a deterministic synthetic corpus generator.
//! - [`lexical`]: tokenization and the verbal feature extractors.
//! - [`visual`]: raster decoding, HSV statistics, face-annotation features.
//! - [`models`]: logistic regression, random forest, ensemble, metrics,
//!   cross-validation.
//! - [`pipeline`]: feature spaces, task training/evaluation, bundles, reports.
//! - [`cli`]: the `empathy-gate` command line.

pub mod cli;
pub mod corpus;
mod error;
pub mod io;
pub mod lexical;
pub mod models;
pub mod pipeline;
pub mod visual;

pub use error::{Error, Result};

/// Tool version recorded in bundles and resolved configs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
