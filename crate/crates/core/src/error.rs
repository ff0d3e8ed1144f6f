use std::path::PathBuf;

use crate::corpus::{AgreementError, CorpusError, FoldError};
use crate::lexical::ResourceError;
use crate::models::ModelError;
use crate::pipeline::{BundleError, PipelineError};
use crate::visual::{FaceError, ImageError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Top-level error for operations that cross module boundaries.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Agreement(#[from] AgreementError),
    #[error(transparent)]
    Folds(#[from] FoldError),
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Faces(#[from] FaceError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
