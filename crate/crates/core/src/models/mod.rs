//! Classifiers, the weighted ensemble, metrics and cross-validation.

pub mod crossval;
pub mod ensemble;
pub mod forest;
pub mod logistic;
pub mod matrix;
pub mod metrics;
pub mod optim;
pub mod softmax;

pub use crossval::{cross_validate, CvReport, FoldFeaturizer, FoldMatrices, FoldResult, OutOfFold};
pub use ensemble::{
    combine, ensemble_predict, ensemble_weight_search, fit_ensemble, weight_grid_losses,
    EnsembleConfig, EnsembleFit, EnsembleWeights, VoteMode,
};
pub use forest::{forest_predict, train_forest, ForestConfig, ForestModel};
pub use logistic::{logistic_predict, sigmoid, train_logistic, LogRegConfig, LogRegModel};
pub use matrix::{CsrMatrix, SparseVector};
pub use metrics::{binary_cross_entropy, compute_metrics, Confusion, Metrics, PROB_CLIP};
pub use softmax::{train_softmax, SoftmaxModel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: model expects {expected}, input has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("too few samples: {0}")]
    TooFewSamples(usize),
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("empty input")]
    Empty,
    #[error("invalid ensemble weights ({w1}, {w2})")]
    InvalidWeights { w1: f64, w2: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
