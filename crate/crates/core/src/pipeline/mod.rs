//! Feature assembly, task orchestration, bundles and reports.

pub mod bundle;
pub mod mask;
pub mod report;
pub mod resources;
pub mod space;
pub mod task;

pub use bundle::{load_bundle, save_bundle, BundleError, TrainedBundle, BUNDLE_SCHEMA_VERSION};
pub use mask::{FeatureFlag, FeatureSetMask};
pub use report::{emit_report, ReportFormat, ReportRow, ReportTable};
pub use resources::{ResourcePaths, Resources};
pub use space::{
    assemble_vector, extract_item, fit_feature_space, prepare_inputs, prepare_task, Block,
    FeatureSpace, FeatureVector, ItemFeatures, ItemInput, PreparedTask, Standardization,
};
pub use task::{
    category_subset, crossval_task, evaluate_task, group_rows, train_task, CrossValOutcome,
    EvalReport, GroupBy, GroupMetrics, Prediction, PreparedFolds,
};

use crate::corpus::Task;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid feature mask: {0}")]
    InvalidMask(String),
    #[error("visual features invalid for ER")]
    VisualForResponses,
    #[error("feature family {flag} needs a {resource}")]
    MissingResource {
        flag: FeatureFlag,
        resource: &'static str,
    },
    #[error("{0} task data contains a single class")]
    SingleClass(Task),
    #[error("no items for the {0} task")]
    NoItems(Task),
    #[error("resource mismatch: {0}")]
    ResourceMismatch(String),
}
