//! Feature spaces: block layout, vocabulary, standardization, and vector
//! assembly.

use std::path::{Path, PathBuf};

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mask::{FeatureFlag, FeatureSetMask};
use super::resources::Resources;
use super::PipelineError;
use crate::corpus::{Corpus, Task, TaskItem};
use crate::lexical::{
    amplifier_features, extract_ngrams, lexicon_features, literary_features,
    psycholinguistic_features, speech_act_features, tfidf_from_ngrams, tokenize,
    vocabulary_from_ngrams, Ngram, TokenStream, Vocabulary, LD_WIDTH, LF_WIDTH,
    MIN_CORPUS_FREQUENCY, SA_WIDTH, SF_WIDTH,
};
use crate::models::{CsrMatrix, SparseVector};
use crate::visual::{
    decode_image, face_presence_features, gaze_sentiment_features, hsv_features,
    load_face_annotations, HsvStats, FP_WIDTH, GFS_WIDTH,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub flag: FeatureFlag,
    pub offset: usize,
    pub width: usize,
}

/// Per-dimension z-scoring of the dense blocks (everything after BF).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpace {
    pub task: Task,
    pub mask: FeatureSetMask,
    pub vocabulary: Option<Vocabulary>,
    /// Psycholinguistic category names, in dimension order.
    pub pf_categories: Vec<String>,
    pub layout: Vec<Block>,
    pub standardization: Standardization,
}

/// The text and optional image behind one task item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemInput {
    pub key: String,
    pub text: String,
    pub image: Option<PathBuf>,
}

impl ItemInput {
    pub fn new(key: impl Into<String>, text: impl Into<String>, image: Option<PathBuf>) -> Self {
        ItemInput {
            key: key.into(),
            text: text.into(),
            image,
        }
    }

    /// Posts carry their resolved image; responses never have one.
    pub fn from_task_item(corpus: &Corpus, item: &TaskItem<'_>) -> Self {
        let image = match item.response {
            None => item
                .post
                .image_path
                .as_deref()
                .map(|p| corpus.resolve_image(p)),
            Some(_) => None,
        };
        ItemInput::new(item.key(), item.text(), image)
    }
}

/// Extracted features before any fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemFeatures {
    /// Empty unless BF is in the mask.
    pub ngrams: Vec<Ngram>,
    /// Dense blocks in layout order.
    pub dense: Vec<f64>,
    /// Visual blocks were zero-filled because the image was unusable.
    pub visual_missing: bool,
    pub warning: Option<String>,
}

/// A fitted space's output for one item: the raw view (for RF) and the
/// standardized view (for LR).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub raw: SparseVector,
    pub standardized: SparseVector,
    pub warning: Option<String>,
}

fn require<'a, T>(
    value: &'a Option<T>,
    flag: FeatureFlag,
    resource: &'static str,
) -> Result<&'a T, PipelineError> {
    value
        .as_ref()
        .ok_or(PipelineError::MissingResource { flag, resource })
}

/// Dense block widths for `mask` given the resources.
fn dense_widths(
    mask: &FeatureSetMask,
    res: &Resources,
) -> Result<Vec<(FeatureFlag, usize)>, PipelineError> {
    let mut out = Vec::new();
    for flag in mask.flags() {
        let width = match flag {
            FeatureFlag::BF => continue,
            FeatureFlag::LF => {
                require(&res.lexicon, flag, "lexicon")?;
                LF_WIDTH
            }
            FeatureFlag::SA => SA_WIDTH,
            FeatureFlag::SF => {
                require(&res.speech_acts, flag, "speech-act model")?;
                SF_WIDTH
            }
            FeatureFlag::LD => {
                require(&res.lexicon, flag, "lexicon")?;
                require(&res.imagery, flag, "imagery list")?;
                LD_WIDTH
            }
            FeatureFlag::PF => require(&res.dictionary, flag, "category dictionary")?.width(),
            FeatureFlag::FP => FP_WIDTH,
            FeatureFlag::GFS => GFS_WIDTH,
            FeatureFlag::HSV => HsvStats::WIDTH,
        };
        out.push((flag, width));
    }
    Ok(out)
}

fn visual_blocks(
    key: &str,
    image: Option<&Path>,
    mask: &FeatureSetMask,
    res: &Resources,
) -> (Vec<f64>, bool, Option<String>) {
    let width: usize = FeatureFlag::VISUAL
        .into_iter()
        .filter(|f| mask.contains(*f))
        .map(|f| match f {
            FeatureFlag::FP => FP_WIDTH,
            FeatureFlag::GFS => GFS_WIDTH,
            _ => HsvStats::WIDTH,
        })
        .sum();
    let fail = |msg: String| {
        warn!("{msg}; visual features set to zero");
        (vec![0.0; width], true, Some(msg))
    };
    let Some(path) = image else {
        return fail(format!("{key}: no image"));
    };
    let raster = match decode_image(path) {
        Ok(r) => r,
        Err(e) => return fail(format!("{key}: {e}")),
    };
    let faces = if mask.contains(FeatureFlag::FP) || mask.contains(FeatureFlag::GFS) {
        match load_face_annotations(&res.sidecar_for(path)) {
            Ok(a) => a,
            Err(e) => return fail(format!("{key}: {e}")),
        }
    } else {
        Default::default()
    };
    let mut out = Vec::with_capacity(width);
    if mask.contains(FeatureFlag::FP) {
        out.extend(face_presence_features(&faces));
    }
    if mask.contains(FeatureFlag::GFS) {
        out.extend(gaze_sentiment_features(&faces));
    }
    if mask.contains(FeatureFlag::HSV) {
        out.extend(hsv_features(&raster).to_vec());
    }
    (out, false, None)
}

/// Runs every extractor in `mask` on one item.
pub fn extract_item(
    input: &ItemInput,
    mask: &FeatureSetMask,
    res: &Resources,
) -> Result<ItemFeatures, PipelineError> {
    let widths = dense_widths(mask, res)?;
    let doc: TokenStream = tokenize(&input.text);
    let ngrams = if mask.contains(FeatureFlag::BF) {
        extract_ngrams(&doc)
    } else {
        Vec::new()
    };
    let mut dense = Vec::with_capacity(widths.iter().map(|w| w.1).sum());
    for (flag, _) in &widths {
        match flag {
            FeatureFlag::LF => dense.extend(lexicon_features(
                &doc,
                res.lexicon.as_ref().expect("checked"),
            )),
            FeatureFlag::SA => dense.extend(amplifier_features(&doc, &res.amplifier)),
            FeatureFlag::SF => dense.extend(speech_act_features(
                &doc,
                res.speech_acts.as_ref().expect("checked"),
            )),
            FeatureFlag::LD => dense.extend(literary_features(
                &doc,
                res.lexicon.as_ref().expect("checked"),
                res.imagery.as_ref().expect("checked"),
                &res.hyperbole,
            )),
            FeatureFlag::PF => dense.extend(psycholinguistic_features(
                &doc,
                res.dictionary.as_ref().expect("checked"),
            )),
            _ => {}
        }
    }
    let (mut visual_missing, mut warning) = (false, None);
    if mask.has_visual() {
        let (v, missing, w) = visual_blocks(&input.key, input.image.as_deref(), mask, res);
        dense.extend(v);
        visual_missing = missing;
        warning = w;
    }
    Ok(ItemFeatures {
        ngrams,
        dense,
        visual_missing,
        warning,
    })
}

/// Extracted features for every item of one task, reusable across folds.
#[derive(Debug, Clone)]
pub struct PreparedTask {
    pub task: Task,
    pub mask: FeatureSetMask,
    pub pf_categories: Vec<String>,
    pub inputs: Vec<ItemInput>,
    pub labels: Vec<bool>,
    pub features: Vec<ItemFeatures>,
}

impl PreparedTask {
    pub fn warnings(&self) -> Vec<&str> {
        self.features
            .iter()
            .filter_map(|f| f.warning.as_deref())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Fits vocabulary and standardization on `rows` only.
    pub fn fit_space(&self, rows: &[usize]) -> FeatureSpace {
        let vocabulary = self.mask.contains(FeatureFlag::BF).then(|| {
            let docs: Vec<&[Ngram]> = rows
                .iter()
                .map(|&i| self.features[i].ngrams.as_slice())
                .collect();
            vocabulary_from_ngrams(&docs, MIN_CORPUS_FREQUENCY)
        });
        let dense_width = self.features.first().map_or(0, |f| f.dense.len());
        let standardization = fit_standardization(
            rows.iter().map(|&i| &self.features[i].dense[..]),
            dense_width,
        );
        let mut layout = Vec::new();
        let mut offset = 0;
        if let Some(v) = &vocabulary {
            layout.push(Block {
                flag: FeatureFlag::BF,
                offset: 0,
                width: v.len(),
            });
            offset = v.len();
        }
        for flag in self.mask.flags().filter(|f| *f != FeatureFlag::BF) {
            let width = match flag {
                FeatureFlag::LF => LF_WIDTH,
                FeatureFlag::SA => SA_WIDTH,
                FeatureFlag::SF => SF_WIDTH,
                FeatureFlag::LD => LD_WIDTH,
                FeatureFlag::PF => 3 + self.pf_categories.len(),
                FeatureFlag::FP => FP_WIDTH,
                FeatureFlag::GFS => GFS_WIDTH,
                FeatureFlag::HSV => HsvStats::WIDTH,
                FeatureFlag::BF => unreachable!(),
            };
            layout.push(Block {
                flag,
                offset,
                width,
            });
            offset += width;
        }
        FeatureSpace {
            task: self.task,
            mask: self.mask.clone(),
            vocabulary,
            pf_categories: self.pf_categories.clone(),
            layout,
            standardization,
        }
    }

    /// `(standardized, raw)` design matrices for `rows`.
    pub fn matrices(&self, space: &FeatureSpace, rows: &[usize]) -> (CsrMatrix, CsrMatrix) {
        let vectors: Vec<(SparseVector, SparseVector)> = rows
            .par_iter()
            .map(|&i| space.vectors_from(&self.features[i]))
            .collect();
        let mut std = CsrMatrix::new(space.width());
        let mut raw = CsrMatrix::new(space.width());
        for (r, s) in &vectors {
            raw.push_sparse(r);
            std.push_sparse(s);
        }
        (std, raw)
    }
}

fn fit_standardization<'a, I: Iterator<Item = &'a [f64]> + Clone>(
    rows: I,
    width: usize,
) -> Standardization {
    let n = rows.clone().count();
    let mut mean = vec![0.0; width];
    let mut std = vec![1.0; width];
    if n == 0 {
        return Standardization { mean, std };
    }
    for r in rows.clone() {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut var = vec![0.0; width];
    for r in rows {
        for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    for (s, v) in std.iter_mut().zip(&var) {
        let sd = (v / n as f64).sqrt();
        *s = if sd > 1e-12 { sd } else { 1.0 };
    }
    Standardization { mean, std }
}

/// Extracts features for every item of `task` in [`Corpus::task_items`]
/// order. Extraction runs in parallel; output order is fixed.
pub fn prepare_task(
    corpus: &Corpus,
    task: Task,
    mask: &FeatureSetMask,
    res: &Resources,
) -> Result<PreparedTask, PipelineError> {
    let items = corpus.task_items(task);
    let inputs: Vec<ItemInput> = items
        .iter()
        .map(|it| ItemInput::from_task_item(corpus, it))
        .collect();
    let labels = items.iter().map(|it| it.is_positive()).collect();
    prepare_inputs(inputs, labels, task, mask, res)
}

pub fn prepare_inputs(
    inputs: Vec<ItemInput>,
    labels: Vec<bool>,
    task: Task,
    mask: &FeatureSetMask,
    res: &Resources,
) -> Result<PreparedTask, PipelineError> {
    mask.check_task(task)?;
    dense_widths(mask, res)?;
    let features = inputs
        .par_iter()
        .map(|it| extract_item(it, mask, res))
        .collect::<Result<Vec<_>, _>>()?;
    let pf_categories = if mask.contains(FeatureFlag::PF) {
        res.dictionary
            .as_ref()
            .map(|d| d.names().into_iter().map(String::from).collect())
            .unwrap_or_default()
    } else {
        Vec::new()
    };
    Ok(PreparedTask {
        task,
        mask: mask.clone(),
        pf_categories,
        inputs,
        labels,
        features,
    })
}

/// Fits a feature space on `items`: vocabulary from their texts,
/// standardization from their dense blocks.
pub fn fit_feature_space(
    items: &[ItemInput],
    task: Task,
    mask: &FeatureSetMask,
    res: &Resources,
) -> Result<FeatureSpace, PipelineError> {
    let prepared = prepare_inputs(items.to_vec(), vec![false; items.len()], task, mask, res)?;
    let rows: Vec<usize> = (0..items.len()).collect();
    Ok(prepared.fit_space(&rows))
}

impl FeatureSpace {
    pub fn width(&self) -> usize {
        self.layout.last().map_or(0, |b| b.offset + b.width)
    }

    pub fn block(&self, flag: FeatureFlag) -> Option<Block> {
        self.layout.iter().copied().find(|b| b.flag == flag)
    }

    fn dense_offset(&self) -> usize {
        self.block(FeatureFlag::BF).map_or(0, |b| b.width)
    }

    /// Dense index where the visual blocks start.
    fn visual_start(&self) -> Option<usize> {
        self.layout
            .iter()
            .find(|b| b.flag.is_visual())
            .map(|b| b.offset - self.dense_offset())
    }

    /// Checks that `res` yields vectors of this space's shape.
    pub fn check_resources(&self, res: &Resources) -> Result<(), PipelineError> {
        if self.mask.contains(FeatureFlag::PF) {
            let names: Vec<&str> = res
                .dictionary
                .as_ref()
                .map(|d| d.names())
                .unwrap_or_default();
            if names
                != self
                    .pf_categories
                    .iter()
                    .map(String::as_str)
                    .collect::<Vec<_>>()
            {
                return Err(PipelineError::ResourceMismatch(format!(
                    "category dictionary has categories {names:?}, bundle expects {:?}",
                    self.pf_categories
                )));
            }
        }
        dense_widths(&self.mask, res).map(|_| ())
    }

    /// `(raw, standardized)` for already-extracted features.
    pub fn vectors_from(&self, f: &ItemFeatures) -> (SparseVector, SparseVector) {
        let width = self.width();
        let base = self.dense_offset();
        let mut raw = match &self.vocabulary {
            Some(v) => tfidf_from_ngrams(&f.ngrams, v).entries,
            None => Vec::new(),
        };
        let mut std = raw.clone();
        let visual_start = self.visual_start();
        let st = &self.standardization;
        for (j, &x) in f.dense.iter().enumerate() {
            if x != 0.0 {
                raw.push((base + j, x));
            }
            let zeroed = f.visual_missing && visual_start.is_some_and(|s| j >= s);
            let z = if zeroed {
                0.0
            } else {
                (x - st.mean[j]) / st.std[j]
            };
            if z != 0.0 {
                std.push((base + j, z));
            }
        }
        (
            SparseVector {
                dim: width,
                entries: raw,
            },
            SparseVector {
                dim: width,
                entries: std,
            },
        )
    }
}

/// Extracts and places one item in a fitted space.
pub fn assemble_vector(
    input: &ItemInput,
    space: &FeatureSpace,
    res: &Resources,
) -> Result<FeatureVector, PipelineError> {
    space.check_resources(res)?;
    let f = extract_item(input, &space.mask, res)?;
    let (raw, standardized) = space.vectors_from(&f);
    Ok(FeatureVector {
        raw,
        standardized,
        warning: f.warning,
    })
}
