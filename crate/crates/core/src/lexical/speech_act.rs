//! Seven-class sentence speech-act classifier and its per-text features.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::tokenize::{tokenize, Token, TokenKind, TokenStream};
use super::ResourceError;
use crate::corpus::stratified_holdout_classes;
use crate::models::{train_softmax, CsrMatrix, LogRegConfig, SoftmaxModel, SparseVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeechAct {
    Apology,
    Appreciation,
    ResponseAcknowledgment,
    OpinionedResponse,
    NonOpinionedResponse,
    Gratitude,
    Other,
}

impl SpeechAct {
    pub const ALL: [SpeechAct; 7] = [
        SpeechAct::Apology,
        SpeechAct::Appreciation,
        SpeechAct::ResponseAcknowledgment,
        SpeechAct::OpinionedResponse,
        SpeechAct::NonOpinionedResponse,
        SpeechAct::Gratitude,
        SpeechAct::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SpeechAct::Apology => "apology",
            SpeechAct::Appreciation => "appreciation",
            SpeechAct::ResponseAcknowledgment => "response_acknowledgment",
            SpeechAct::OpinionedResponse => "opinioned_response",
            SpeechAct::NonOpinionedResponse => "non_opinioned_response",
            SpeechAct::Gratitude => "gratitude",
            SpeechAct::Other => "other",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for SpeechAct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SpeechAct {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        SpeechAct::ALL
            .into_iter()
            .find(|a| a.as_str() == s.trim())
            .ok_or_else(|| format!("unknown speech act {s:?}"))
    }
}

pub const SF_WIDTH: usize = 7;

/// Parses `class<TAB>sentence` lines; `#` comments and blank lines skipped.
pub fn parse_speech_act_tsv(text: &str) -> Result<Vec<(SpeechAct, String)>, ResourceError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (class, sentence) = line.split_once('\t').ok_or_else(|| {
            ResourceError::invalid("speech acts", n + 1, "expected class<TAB>sentence")
        })?;
        let act = class
            .parse()
            .map_err(|e: String| ResourceError::invalid("speech acts", n + 1, e))?;
        out.push((act, sentence.trim().to_string()));
    }
    Ok(out)
}

fn sentence_features(tokens: &[Token]) -> Vec<String> {
    let units: Vec<&str> = tokens
        .iter()
        .filter(|t| matches!(t.kind, TokenKind::Word | TokenKind::Placeholder))
        .map(|t| t.text.as_str())
        .collect();
    let mut out: Vec<String> = units.iter().map(|u| format!("u:{u}")).collect();
    out.extend(units.windows(2).map(|w| format!("b:{} {}", w[0], w[1])));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeechActModel {
    /// Class order of the output distribution.
    pub classes: Vec<SpeechAct>,
    /// Sorted feature names (`u:word`, `b:word word`).
    pub features: Vec<String>,
    pub model: SoftmaxModel,
    /// Accuracy on the stratified 20 % holdout before the final refit.
    pub holdout_accuracy: f64,
}

impl SpeechActModel {
    fn encode(&self, tokens: &[Token]) -> SparseVector {
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for f in sentence_features(tokens) {
            if let Ok(i) = self.features.binary_search(&f) {
                entries.push((i, 1.0));
            }
        }
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += v,
                _ => merged.push((i, v)),
            }
        }
        SparseVector {
            dim: self.features.len(),
            entries: merged,
        }
    }

    /// Class distribution for one sentence's tokens.
    pub fn predict_sentence(&self, tokens: &[Token]) -> Vec<f64> {
        self.model.predict_sparse(&self.encode(tokens).entries)
    }

    pub fn predict_text(&self, text: &str) -> Vec<f64> {
        self.predict_sentence(&tokenize(text).tokens)
    }
}

fn fit(
    examples: &[(SpeechAct, Vec<Token>)],
    cfg: &LogRegConfig,
) -> Result<SpeechActModel, ResourceError> {
    let mut features: Vec<String> = examples
        .iter()
        .flat_map(|(_, t)| sentence_features(t))
        .collect();
    features.sort();
    features.dedup();
    let mut model = SpeechActModel {
        classes: SpeechAct::ALL.to_vec(),
        features,
        model: SoftmaxModel {
            n_classes: SF_WIDTH,
            dim: 0,
            weights: Vec::new(),
            biases: Vec::new(),
        },
        holdout_accuracy: f64::NAN,
    };
    let mut x = CsrMatrix::new(model.features.len());
    for (_, t) in examples {
        x.push_sparse(&model.encode(t));
    }
    let y: Vec<usize> = examples.iter().map(|(a, _)| a.index()).collect();
    model.model = train_softmax(&x, &y, SF_WIDTH, cfg.l2_lambda, cfg.tol, cfg.max_iters)?;
    Ok(model)
}

/// Trains the classifier on labelled sentences. A stratified 80/20 split
/// measures held-out accuracy, then the model is refit on every example.
pub fn train_speech_act_model(
    examples: &[(SpeechAct, String)],
    cfg: &LogRegConfig,
    seed: u64,
) -> Result<SpeechActModel, ResourceError> {
    for act in SpeechAct::ALL {
        if !examples.iter().any(|(a, _)| *a == act) {
            return Err(ResourceError::MissingSpeechAct(act.as_str().to_string()));
        }
    }
    let tokenized: Vec<(SpeechAct, Vec<Token>)> = examples
        .iter()
        .map(|(a, s)| (*a, tokenize(s).tokens))
        .collect();
    let labels: Vec<usize> = tokenized.iter().map(|(a, _)| a.index()).collect();
    let (train, held) = stratified_holdout_classes(&labels, 0.2, seed);
    let holdout_accuracy = if held.is_empty() {
        f64::NAN
    } else {
        let sub: Vec<(SpeechAct, Vec<Token>)> =
            train.iter().map(|&i| tokenized[i].clone()).collect();
        let m = fit(&sub, cfg)?;
        let correct = held
            .iter()
            .filter(|&&i| {
                let p = m.predict_sentence(&tokenized[i].1);
                argmax(&p) == labels[i]
            })
            .count();
        correct as f64 / held.len() as f64
    };
    let mut model = fit(&tokenized, cfg)?;
    model.holdout_accuracy = holdout_accuracy;
    Ok(model)
}

fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in p.iter().enumerate() {
        if *v > p[best] {
            best = i;
        }
    }
    best
}

/// Mean per-sentence class distribution; uniform when there are no
/// sentences.
pub fn speech_act_features(doc: &TokenStream, m: &SpeechActModel) -> [f64; SF_WIDTH] {
    let mut out = [0.0; SF_WIDTH];
    if doc.n_sentences() == 0 {
        return [1.0 / SF_WIDTH as f64; SF_WIDTH];
    }
    for s in doc.sentences() {
        for (o, p) in out.iter_mut().zip(m.predict_sentence(s)) {
            *o += p;
        }
    }
    let k = doc.n_sentences() as f64;
    out.map(|v| v / k)
}
