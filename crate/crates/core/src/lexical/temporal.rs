use std::collections::HashSet;

use super::tokenize::TokenStream;

pub const DEFAULT_TEMPORAL_WORDS: &[&str] = &[
    "today",
    "tonight",
    "yesterday",
    "tomorrow",
    "day",
    "days",
    "week",
    "weeks",
    "month",
    "months",
    "year",
    "years",
    "ago",
    "now",
];

pub const TEMPORAL_WIDTH: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalLexicon {
    words: HashSet<String>,
}

impl Default for TemporalLexicon {
    fn default() -> Self {
        Self::from_words(DEFAULT_TEMPORAL_WORDS.iter().copied())
    }
}

impl TemporalLexicon {
    pub fn from_words<'a, I: IntoIterator<Item = &'a str>>(words: I) -> Self {
        TemporalLexicon {
            words: words.into_iter().map(str::to_lowercase).collect(),
        }
    }
}

/// `[any_temporal, temporal_count]`.
pub fn temporal_features(doc: &TokenStream, lex: &TemporalLexicon) -> [f64; TEMPORAL_WIDTH] {
    let count = doc
        .words()
        .iter()
        .filter(|w| lex.words.contains(**w))
        .count();
    [f64::from(u8::from(count > 0)), count as f64]
}
