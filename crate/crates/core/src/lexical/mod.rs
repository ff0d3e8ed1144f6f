//! Tokenization and the verbal feature families.

pub mod amplifier;
pub mod lexicon;
pub mod ngram;
pub mod psycholinguistic;
pub mod speech_act;
pub mod temporal;
pub mod tokenize;

use std::path::PathBuf;

pub use amplifier::{amplifier_features, AmplifierConfig, SA_NAMES, SA_WIDTH};
pub use lexicon::{
    lexicon_features, literary_features, HyperboleConfig, ImageryList, LexiconEntry,
    SentimentLexicon, LD_NAMES, LD_WIDTH, LF_NAMES, LF_WIDTH,
};
pub use ngram::{
    build_vocabulary, build_vocabulary_with_min, extract_ngrams, tfidf_from_ngrams, tfidf_vector,
    vocabulary_from_ngrams, Ngram, NgramKind, Vocabulary, MIN_CORPUS_FREQUENCY,
};
pub use psycholinguistic::{psycholinguistic_features, CategoryDictionary, Pattern};
pub use speech_act::{
    parse_speech_act_tsv, speech_act_features, train_speech_act_model, SpeechAct, SpeechActModel,
    SF_WIDTH,
};
pub use temporal::{temporal_features, TemporalLexicon, TEMPORAL_WIDTH};
pub use tokenize::{tokenize, Token, TokenKind, TokenStream};

use crate::models::ModelError;

#[derive(Debug, thiserror::Error)]
pub enum ResourceError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{resource}: line {line}: {message}")]
    Invalid {
        resource: &'static str,
        line: usize,
        message: String,
    },
    #[error("category dictionary lacks required category {0:?}")]
    MissingCategory(String),
    #[error("category {0:?} defined twice")]
    DuplicateCategory(String),
    #[error("speech-act training data has no {0:?} examples")]
    MissingSpeechAct(String),
    #[error("speech-act model: {0}")]
    Model(#[from] ModelError),
}

impl ResourceError {
    pub(crate) fn invalid(resource: &'static str, line: usize, message: impl Into<String>) -> Self {
        ResourceError::Invalid {
            resource,
            line,
            message: message.into(),
        }
    }

    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            ResourceError::Invalid {
                resource, message, ..
            } => ResourceError::Invalid {
                resource,
                line,
                message,
            },
            other => other,
        }
    }
}
