//! Sentiment lexicon features and literary-device features.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::tokenize::TokenStream;
use super::ResourceError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub polarity: f64,
    /// Pleasantness, attention, sensitivity, aptitude.
    pub dims: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SentimentLexicon {
    entries: HashMap<String, LexiconEntry>,
    max_words: usize,
}

fn normalize_term(term: &str) -> String {
    term.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

impl SentimentLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, term: &str, entry: LexiconEntry) -> Result<(), ResourceError> {
        let key = normalize_term(term);
        if key.is_empty() {
            return Err(ResourceError::invalid("lexicon", 0, "empty term"));
        }
        let bounded = |v: f64| v.is_finite() && (-1.0..=1.0).contains(&v);
        if !bounded(entry.polarity) || !entry.dims.iter().copied().all(bounded) {
            return Err(ResourceError::invalid(
                "lexicon",
                0,
                format!("values for {key:?} outside [-1, 1]"),
            ));
        }
        self.max_words = self.max_words.max(key.split(' ').count());
        self.entries.insert(key, entry);
        Ok(())
    }

    /// Polarity-only entry with zero dimensions.
    pub fn insert_polarity(&mut self, term: &str, polarity: f64) -> Result<(), ResourceError> {
        self.insert(
            term,
            LexiconEntry {
                polarity,
                dims: [0.0; 4],
            },
        )
    }

    pub fn get(&self, term: &str) -> Option<&LexiconEntry> {
        self.entries.get(term)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses `term<TAB>polarity<TAB>d1<TAB>d2<TAB>d3<TAB>d4`; `#` starts a
    /// comment line.
    pub fn parse_tsv(text: &str) -> Result<Self, ResourceError> {
        let mut lex = SentimentLexicon::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 6 {
                return Err(ResourceError::invalid(
                    "lexicon",
                    line_no,
                    format!("expected 6 tab-separated columns, found {}", cols.len()),
                ));
            }
            let mut nums = [0.0; 5];
            for (k, c) in cols[1..].iter().enumerate() {
                nums[k] = c.trim().parse().map_err(|_| {
                    ResourceError::invalid("lexicon", line_no, format!("not a number: {c:?}"))
                })?;
            }
            let entry = LexiconEntry {
                polarity: nums[0],
                dims: [nums[1], nums[2], nums[3], nums[4]],
            };
            lex.insert(cols[0], entry).map_err(|e| e.at_line(line_no))?;
        }
        Ok(lex)
    }

    /// Greedy longest-match over `words`: `(start, length, entry)` per match.
    pub fn matches<'a>(&'a self, words: &[&str]) -> Vec<(usize, usize, &'a LexiconEntry)> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < words.len() {
            let longest = self.max_words.min(words.len() - i);
            let hit = (1..=longest).rev().find_map(|len| {
                let key = words[i..i + len].join(" ");
                self.entries.get(&key).map(|e| (len, e))
            });
            match hit {
                Some((len, e)) => {
                    out.push((i, len, e));
                    i += len;
                }
                None => i += 1,
            }
        }
        out
    }
}

pub const LF_WIDTH: usize = 10;
pub const LF_NAMES: [&str; LF_WIDTH] = [
    "mean_polarity",
    "min_polarity",
    "max_polarity",
    "positive_count",
    "negative_count",
    "coverage",
    "pleasantness",
    "attention",
    "sensitivity",
    "aptitude",
];

/// Polarity statistics over lexicon matches; zero when nothing matches.
pub fn lexicon_features(doc: &TokenStream, lex: &SentimentLexicon) -> [f64; LF_WIDTH] {
    let words = doc.words();
    let hits = lex.matches(&words);
    let mut out = [0.0; LF_WIDTH];
    if hits.is_empty() {
        return out;
    }
    let k = hits.len() as f64;
    let pol: Vec<f64> = hits.iter().map(|h| h.2.polarity).collect();
    out[0] = pol.iter().sum::<f64>() / k;
    out[1] = pol.iter().copied().fold(f64::INFINITY, f64::min);
    out[2] = pol.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    out[3] = pol.iter().filter(|&&p| p > 0.0).count() as f64;
    out[4] = pol.iter().filter(|&&p| p < 0.0).count() as f64;
    out[5] = hits.iter().map(|h| h.1).sum::<usize>() as f64 / words.len() as f64;
    for d in 0..4 {
        out[6 + d] = hits.iter().map(|h| h.2.dims[d]).sum::<f64>() / k;
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ImageryList {
    words: HashSet<String>,
}

impl ImageryList {
    pub fn from_words<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        ImageryList {
            words: words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        }
    }

    /// One word per line; `#` starts a comment line.
    pub fn parse(text: &str) -> Self {
        Self::from_words(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn contains(&self, w: &str) -> bool {
        self.words.contains(w)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperboleConfig {
    pub min_run: usize,
    pub min_abs_polarity: f64,
}

impl Default for HyperboleConfig {
    fn default() -> Self {
        HyperboleConfig {
            min_run: 2,
            min_abs_polarity: 0.3,
        }
    }
}

pub const LD_WIDTH: usize = 3;
pub const LD_NAMES: [&str; LD_WIDTH] = ["hyperbole", "hyperbole_runs", "imagery_ratio"];

/// Hyperbole flag and run count over consecutive same-sign strong words,
/// plus the share of words found in the imagery list.
pub fn literary_features(
    doc: &TokenStream,
    lex: &SentimentLexicon,
    imagery: &ImageryList,
    cfg: &HyperboleConfig,
) -> [f64; LD_WIDTH] {
    let words = doc.words();
    let mut runs = 0usize;
    let mut run_len = 0usize;
    let mut run_sign = 0.0f64;
    let min_run = cfg.min_run.max(1);
    for w in &words {
        let sign = match lex.get(w) {
            Some(e) if e.polarity.abs() >= cfg.min_abs_polarity && e.polarity != 0.0 => {
                e.polarity.signum()
            }
            _ => 0.0,
        };
        if sign != 0.0 && sign == run_sign {
            run_len += 1;
        } else {
            if run_len >= min_run {
                runs += 1;
            }
            run_len = usize::from(sign != 0.0);
            run_sign = sign;
        }
    }
    if run_len >= min_run {
        runs += 1;
    }
    let hits = words.iter().filter(|w| imagery.contains(w)).count();
    let ratio = if words.is_empty() {
        0.0
    } else {
        hits as f64 / words.len() as f64
    };
    [f64::from(u8::from(runs > 0)), runs as f64, ratio]
}
