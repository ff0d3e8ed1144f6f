//! Labeled context–response corpora: schema, validation, anonymization,
//! annotator agreement, stratified folds, and synthetic generation.

mod agreement;
mod anonymize;
mod folds;
mod schema;
mod synth;
mod validate;

pub use agreement::{count_ties, fleiss_kappa, AgreementError, LabelMatrix};
pub use anonymize::{anonymize_text, EMAIL_TOKEN, URL_TOKEN, USER_TOKEN};
pub use folds::{
    stratified_folds, stratified_folds_for_labels, stratified_holdout, stratified_holdout_classes,
    FoldError,
};
pub use schema::{
    load_corpus, Category, Corpus, CorpusError, Gender, Post, PostLabel, Response, ResponseLabel,
    Source, Task, TaskItem, SCHEMA_VERSION,
};
pub use synth::{generate_synthetic, SyntheticCorpus, SyntheticImage, SyntheticSpec};
pub use validate::{validate_corpus, violations_csv, Rule, Violation, ANNOTATORS};
