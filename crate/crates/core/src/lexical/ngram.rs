//! Baseline n-gram features: vocabulary and tf-idf vectors.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::tokenize::{TokenKind, TokenStream};
use crate::models::SparseVector;

/// Minimum total corpus frequency for an n-gram to enter the vocabulary.
pub const MIN_CORPUS_FREQUENCY: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NgramKind {
    Unigram,
    Bigram,
    Trigram,
    /// Two tokens with exactly one token skipped between them.
    SkipBigram,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ngram {
    pub kind: NgramKind,
    /// Space-joined tokens.
    pub text: String,
}

/// Every n-gram occurrence in `doc`. N-grams are formed from word and
/// placeholder tokens within one sentence; punctuation never participates.
pub fn extract_ngrams(doc: &TokenStream) -> Vec<Ngram> {
    let mut out = Vec::new();
    for sentence in doc.sentences() {
        let units: Vec<&str> = sentence
            .iter()
            .filter(|t| matches!(t.kind, TokenKind::Word | TokenKind::Placeholder))
            .map(|t| t.text.as_str())
            .collect();
        for (i, u) in units.iter().enumerate() {
            out.push(Ngram {
                kind: NgramKind::Unigram,
                text: (*u).to_string(),
            });
            if let Some(b) = units.get(i + 1) {
                out.push(Ngram {
                    kind: NgramKind::Bigram,
                    text: format!("{u} {b}"),
                });
            }
            if let Some(c) = units.get(i + 2) {
                out.push(Ngram {
                    kind: NgramKind::Trigram,
                    text: format!("{u} {} {c}", units[i + 1]),
                });
                out.push(Ngram {
                    kind: NgramKind::SkipBigram,
                    text: format!("{u} {c}"),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabEntry {
    pub ngram: Ngram,
    pub document_frequency: usize,
    pub corpus_frequency: usize,
}

/// Sorted n-gram table; an entry's index is its position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "VocabularyRepr", into = "VocabularyRepr")]
pub struct Vocabulary {
    pub n_docs: usize,
    entries: Vec<VocabEntry>,
    lookup: HashMap<Ngram, usize>,
}

#[derive(Serialize, Deserialize)]
struct VocabularyRepr {
    n_docs: usize,
    entries: Vec<VocabEntry>,
}

impl From<VocabularyRepr> for Vocabulary {
    fn from(r: VocabularyRepr) -> Self {
        Vocabulary::from_entries(r.n_docs, r.entries)
    }
}

impl From<Vocabulary> for VocabularyRepr {
    fn from(v: Vocabulary) -> Self {
        VocabularyRepr {
            n_docs: v.n_docs,
            entries: v.entries,
        }
    }
}

impl Vocabulary {
    fn from_entries(n_docs: usize, entries: Vec<VocabEntry>) -> Self {
        let lookup = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.ngram.clone(), i))
            .collect();
        Vocabulary {
            n_docs,
            entries,
            lookup,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }

    pub fn index_of(&self, g: &Ngram) -> Option<usize> {
        self.lookup.get(g).copied()
    }

    /// `ln((1 + N) / (1 + df)) + 1`.
    pub fn idf(&self, index: usize) -> f64 {
        let df = self.entries[index].document_frequency as f64;
        ((1.0 + self.n_docs as f64) / (1.0 + df)).ln() + 1.0
    }
}

/// Collects every n-gram whose total frequency across `docs` is at least
/// [`MIN_CORPUS_FREQUENCY`].
pub fn build_vocabulary(docs: &[TokenStream]) -> Vocabulary {
    build_vocabulary_with_min(docs, MIN_CORPUS_FREQUENCY)
}

pub fn build_vocabulary_with_min(docs: &[TokenStream], min_frequency: usize) -> Vocabulary {
    let lists: Vec<Vec<Ngram>> = docs.iter().map(extract_ngrams).collect();
    let refs: Vec<&[Ngram]> = lists.iter().map(Vec::as_slice).collect();
    vocabulary_from_ngrams(&refs, min_frequency)
}

/// [`build_vocabulary_with_min`] over pre-extracted n-gram lists, one per
/// document.
pub fn vocabulary_from_ngrams(docs: &[&[Ngram]], min_frequency: usize) -> Vocabulary {
    let mut counts: HashMap<&Ngram, (usize, usize)> = HashMap::new();
    for doc in docs {
        let mut seen: HashSet<&Ngram> = HashSet::new();
        for g in doc.iter() {
            let slot = counts.entry(g).or_insert((0, 0));
            slot.1 += 1;
            if seen.insert(g) {
                slot.0 += 1;
            }
        }
    }
    let mut entries: Vec<VocabEntry> = counts
        .into_iter()
        .filter(|(_, (_, cf))| *cf >= min_frequency)
        .map(|(ngram, (df, cf))| VocabEntry {
            ngram: ngram.clone(),
            document_frequency: df,
            corpus_frequency: cf,
        })
        .collect();
    entries.sort_by(|a, b| a.ngram.cmp(&b.ngram));
    Vocabulary::from_entries(docs.len(), entries)
}

/// `tf · idf` over in-vocabulary n-grams, L2-normalized. Documents with no
/// in-vocabulary n-gram map to the zero vector.
pub fn tfidf_vector(doc: &TokenStream, v: &Vocabulary) -> SparseVector {
    tfidf_from_ngrams(&extract_ngrams(doc), v)
}

pub fn tfidf_from_ngrams(ngrams: &[Ngram], v: &Vocabulary) -> SparseVector {
    let mut tf: BTreeMap<usize, usize> = BTreeMap::new();
    for g in ngrams {
        if let Some(i) = v.index_of(g) {
            *tf.entry(i).or_insert(0) += 1;
        }
    }
    let mut entries: Vec<(usize, f64)> = tf
        .into_iter()
        .map(|(i, c)| (i, c as f64 * v.idf(i)))
        .collect();
    let norm = entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    if norm > 0.0 {
        for e in &mut entries {
            e.1 /= norm;
        }
    }
    SparseVector {
        dim: v.len(),
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexical::tokenize;

    fn docs(texts: &[&str]) -> Vec<TokenStream> {
        texts.iter().map(|t| tokenize(t)).collect()
    }

    #[test]
    fn frequency_boundary() {
        let mut texts = vec!["i feel low"; 5];
        texts.extend(["xyz"; 4]);
        let v = build_vocabulary(&docs(&texts));
        let bi = Ngram {
            kind: NgramKind::Bigram,
            text: "feel low".into(),
        };
        let xyz = Ngram {
            kind: NgramKind::Unigram,
            text: "xyz".into(),
        };
        assert!(v.index_of(&bi).is_some());
        assert!(v.index_of(&xyz).is_none());
        assert!(v.entries().iter().all(|e| e.corpus_frequency >= 5));
    }

    #[test]
    fn skip_bigram_counted_once() {
        let g = extract_ngrams(&tokenize("a b c"));
        let skips: Vec<&Ngram> = g
            .iter()
            .filter(|g| g.kind == NgramKind::SkipBigram)
            .collect();
        assert_eq!(skips.len(), 1);
        assert_eq!(skips[0].text, "a c");
        assert_eq!(g.len(), 3 + 2 + 1 + 1);
    }

    #[test]
    fn punctuation_and_sentences_break_ngrams() {
        let g = extract_ngrams(&tokenize("so low. help me"));
        assert!(!g.iter().any(|g| g.text == "low help"));
        assert!(!g.iter().any(|g| g.text.contains('.')));
    }

    #[test]
    fn single_doc_idf_is_one() {
        let d = tokenize("a a a a a b b b b b b b b b b");
        let v = build_vocabulary(std::slice::from_ref(&d));
        for i in 0..v.len() {
            assert_eq!(v.idf(i), 1.0);
        }
        let x = tfidf_vector(&d, &v);
        assert!((x.norm() - 1.0).abs() < 1e-12);
        let ua = v
            .index_of(&Ngram {
                kind: NgramKind::Unigram,
                text: "a".into(),
            })
            .unwrap();
        let ub = v
            .index_of(&Ngram {
                kind: NgramKind::Unigram,
                text: "b".into(),
            })
            .unwrap();
        let dense = x.to_dense();
        assert!((dense[ub] / dense[ua] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_vocabulary_doc_is_zero() {
        let v = build_vocabulary(&docs(&["a b"; 5]));
        let x = tfidf_vector(&tokenize("zzz qqq"), &v);
        assert!(x.is_zero());
        assert_eq!(x.dim, v.len());
    }

    #[test]
    fn serde_round_trip_rebuilds_lookup() {
        let v = build_vocabulary(&docs(&["a b c"; 6]));
        let json = serde_json::to_string(&v).unwrap();
        let back: Vocabulary = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }
}
