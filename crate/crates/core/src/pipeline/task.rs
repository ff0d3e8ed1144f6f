//! Task-level training, evaluation and cross-validation.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::bundle::{TrainedBundle, BUNDLE_SCHEMA_VERSION};
use super::mask::{FeatureFlag, FeatureSetMask};
use super::report::{ReportRow, ReportTable};
use super::resources::Resources;
use super::space::{prepare_task, ItemInput, PreparedTask};
use super::PipelineError;
use crate::corpus::{Category, Corpus, Source, Task};
use crate::models::{
    combine, compute_metrics, cross_validate, fit_ensemble, CsrMatrix, CvReport, EnsembleConfig,
    FoldFeaturizer, FoldMatrices, Metrics, OutOfFold,
};
use crate::{Result, VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    Category,
    Source,
}

impl std::str::FromStr for GroupBy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "category" => Ok(GroupBy::Category),
            "source" => Ok(GroupBy::Source),
            _ => Err(format!(
                "unknown grouping {s:?} (expected category or source)"
            )),
        }
    }
}

fn check_both_classes(task: Task, labels: &[bool]) -> std::result::Result<(), PipelineError> {
    if labels.iter().all(|&b| b) || labels.iter().all(|&b| !b) {
        return Err(PipelineError::SingleClass(task));
    }
    Ok(())
}

/// Fits the feature space and the ensemble on every item of `task`.
pub fn train_task(
    corpus: &Corpus,
    task: Task,
    mask: &FeatureSetMask,
    cfg: &EnsembleConfig,
    res: &Resources,
    seed: u64,
) -> Result<TrainedBundle> {
    mask.check_task(task)?;
    let prepared = prepare_task(corpus, task, mask, res)?;
    check_both_classes(task, &prepared.labels)?;
    let rows: Vec<usize> = (0..prepared.len()).collect();
    let space = prepared.fit_space(&rows);
    let (x_std, x_raw) = prepared.matrices(&space, &rows);
    let fit = fit_ensemble(&x_std, &x_raw, &prepared.labels, cfg, seed)?;
    let created_at = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    Ok(TrainedBundle {
        schema_version: BUNDLE_SCHEMA_VERSION,
        tool_version: VERSION.to_string(),
        created_at,
        task,
        seed,
        config: *cfg,
        speech_act_model: if mask.contains(FeatureFlag::SF) {
            res.speech_acts.clone()
        } else {
            None
        },
        fingerprints: used_fingerprints(mask, res),
        feature_space: space,
        lr: fit.lr,
        rf: fit.rf,
        ensemble: fit.weights,
    })
}

fn used_fingerprints(mask: &FeatureSetMask, res: &Resources) -> BTreeMap<String, String> {
    let mut names = Vec::new();
    if mask.contains(FeatureFlag::LF) || mask.contains(FeatureFlag::LD) {
        names.push("lexicon");
    }
    if mask.contains(FeatureFlag::LD) {
        names.push("imagery");
    }
    if mask.contains(FeatureFlag::PF) {
        names.push("dictionary");
    }
    if mask.contains(FeatureFlag::SF) {
        names.push("speech_acts");
    }
    names
        .into_iter()
        .filter_map(|n| res.fingerprints.get(n).map(|h| (n.to_string(), h.clone())))
        .collect()
}

/// Per-item bundle output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub key: String,
    pub p_lr: f64,
    pub p_rf: f64,
    pub probability: f64,
    pub label: String,
}

impl TrainedBundle {
    /// Resources as the bundle saw them: its own speech-act model replaces
    /// whatever `res` carries.
    pub fn effective_resources(&self, res: &Resources) -> Resources {
        let mut r = res.clone();
        if let Some(m) = &self.speech_act_model {
            r.speech_acts = Some(m.clone());
        }
        r
    }

    pub fn predict_prepared(&self, prepared: &PreparedTask) -> Vec<Prediction> {
        let rows: Vec<usize> = (0..prepared.len()).collect();
        let (x_std, x_raw) = prepared.matrices(&self.feature_space, &rows);
        self.predict_matrices(&x_std, &x_raw)
            .into_iter()
            .zip(&prepared.inputs)
            .map(|((p_lr, p_rf, p), input)| Prediction {
                key: input.key.clone(),
                p_lr,
                p_rf,
                probability: p,
                label: self.label_for(p).to_string(),
            })
            .collect()
    }

    pub fn predict_matrices(&self, x_std: &CsrMatrix, x_raw: &CsrMatrix) -> Vec<(f64, f64, f64)> {
        let p_lr = self.lr.predict_csr(x_std);
        let p_rf = self.rf.predict_csr(x_raw);
        p_lr.into_iter()
            .zip(p_rf)
            .map(|(a, b)| (a, b, combine(self.config.vote, &self.ensemble, a, b)))
            .collect()
    }

    pub fn label_for(&self, p: f64) -> &'static str {
        match (self.task, p >= 0.5) {
            (Task::ES, true) => "ES",
            (Task::ES, false) => "NES",
            (Task::ER, true) => "ER",
            (Task::ER, false) => "NER",
        }
    }

    /// Predicts arbitrary inputs (labels unused).
    pub fn predict_inputs(
        &self,
        inputs: Vec<ItemInput>,
        res: &Resources,
    ) -> Result<Vec<Prediction>> {
        let res = self.effective_resources(res);
        self.feature_space.check_resources(&res)?;
        let n = inputs.len();
        let prepared = super::space::prepare_inputs(
            inputs,
            vec![false; n],
            self.task,
            &self.feature_space.mask,
            &res,
        )?;
        Ok(self.predict_prepared(&prepared))
    }
}

/// Metric triple for one report row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupMetrics {
    pub name: String,
    pub n: usize,
    pub lr: Metrics,
    pub rf: Metrics,
    pub ensemble: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: Task,
    pub overall: GroupMetrics,
    pub groups: Vec<GroupMetrics>,
}

impl EvalReport {
    /// Group rows when grouping was requested, otherwise the overall row.
    pub fn table(&self) -> ReportTable {
        let rows = if self.groups.is_empty() {
            vec![&self.overall]
        } else {
            self.groups.iter().collect()
        };
        ReportTable {
            rows: rows.into_iter().map(ReportRow::from_group).collect(),
        }
    }
}

fn metrics_for(
    name: &str,
    idx: &[usize],
    y: &[bool],
    p: &[(f64, f64, f64)],
) -> Result<GroupMetrics> {
    let yy: Vec<bool> = idx.iter().map(|&i| y[i]).collect();
    let pick =
        |f: fn(&(f64, f64, f64)) -> f64| -> Vec<f64> { idx.iter().map(|&i| f(&p[i])).collect() };
    Ok(GroupMetrics {
        name: name.to_string(),
        n: idx.len(),
        lr: compute_metrics(&yy, &pick(|t| t.0), 0.5)?,
        rf: compute_metrics(&yy, &pick(|t| t.1), 0.5)?,
        ensemble: compute_metrics(&yy, &pick(|t| t.2), 0.5)?,
    })
}

/// Item indices per report row.
///
/// For ES, each positive category is scored together with all NEG posts,
/// and a combined `MH+TS+VA` row follows when two or more categories are
/// present. For ER, rows are the parent post's category. Source grouping
/// uses the parent post's source.
pub fn group_rows(corpus: &Corpus, task: Task, by: GroupBy) -> Vec<(String, Vec<usize>)> {
    let items = corpus.task_items(task);
    match by {
        GroupBy::Source => Source::ALL
            .into_iter()
            .map(|s| {
                let idx: Vec<usize> = (0..items.len())
                    .filter(|&i| items[i].post.source == s)
                    .collect();
                (s.as_str().to_string(), idx)
            })
            .filter(|(_, idx)| !idx.is_empty())
            .collect(),
        GroupBy::Category => {
            let order = [Category::MH, Category::TS, Category::VA];
            let of = |c: Category| -> Vec<usize> {
                (0..items.len())
                    .filter(|&i| items[i].post.category == c)
                    .collect()
            };
            match task {
                Task::ER => order
                    .into_iter()
                    .chain([Category::NEG])
                    .map(|c| (c.as_str().to_string(), of(c)))
                    .filter(|(_, idx)| !idx.is_empty())
                    .collect(),
                Task::ES => {
                    let neg = of(Category::NEG);
                    let present: Vec<Category> =
                        order.into_iter().filter(|&c| !of(c).is_empty()).collect();
                    let mut rows: Vec<(String, Vec<usize>)> = present
                        .iter()
                        .map(|&c| {
                            let mut idx = of(c);
                            idx.extend(&neg);
                            idx.sort_unstable();
                            (c.as_str().to_string(), idx)
                        })
                        .collect();
                    if present.len() >= 2 {
                        let mut idx: Vec<usize> = present.iter().flat_map(|&c| of(c)).collect();
                        idx.extend(&neg);
                        idx.sort_unstable();
                        let name: Vec<&str> = present.iter().map(|c| c.as_str()).collect();
                        rows.push((name.join("+"), idx));
                    }
                    rows
                }
            }
        }
    }
}

fn report_from_predictions(
    corpus: &Corpus,
    task: Task,
    y: &[bool],
    p: &[(f64, f64, f64)],
    group_by: Option<GroupBy>,
) -> Result<EvalReport> {
    let all: Vec<usize> = (0..y.len()).collect();
    let overall = metrics_for("ALL", &all, y, p)?;
    let groups = match group_by {
        None => Vec::new(),
        Some(by) => group_rows(corpus, task, by)
            .into_iter()
            .map(|(name, idx)| metrics_for(&name, &idx, y, p))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(EvalReport {
        task,
        overall,
        groups,
    })
}

/// Scores a bundle on `corpus`, overall and optionally per group.
pub fn evaluate_task(
    bundle: &TrainedBundle,
    corpus: &Corpus,
    group_by: Option<GroupBy>,
    res: &Resources,
) -> Result<EvalReport> {
    let res = bundle.effective_resources(res);
    bundle.feature_space.check_resources(&res)?;
    let prepared = prepare_task(corpus, bundle.task, &bundle.feature_space.mask, &res)?;
    if prepared.is_empty() {
        return Err(PipelineError::NoItems(bundle.task).into());
    }
    let preds = bundle.predict_prepared(&prepared);
    let p: Vec<(f64, f64, f64)> = preds
        .iter()
        .map(|q| (q.p_lr, q.p_rf, q.probability))
        .collect();
    report_from_predictions(corpus, bundle.task, &prepared.labels, &p, group_by)
}

/// Fold featurizer over a [`PreparedTask`]: each fold refits vocabulary and
/// standardization on its training rows.
pub struct PreparedFolds<'a>(pub &'a PreparedTask);

impl FoldFeaturizer for PreparedFolds<'_> {
    fn featurize(&self, train: &[usize], test: &[usize]) -> Result<FoldMatrices> {
        let space = self.0.fit_space(train);
        let (lr_train, rf_train) = self.0.matrices(&space, train);
        let (lr_test, rf_test) = self.0.matrices(&space, test);
        Ok(FoldMatrices {
            lr_train,
            lr_test,
            rf_train,
            rf_test,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValOutcome {
    pub cv: CvReport,
    /// Group rows scored on pooled out-of-fold predictions.
    pub pooled: EvalReport,
}

/// Stratified k-fold CV of the whole pipeline on `task`.
pub fn crossval_task(
    corpus: &Corpus,
    task: Task,
    mask: &FeatureSetMask,
    cfg: &EnsembleConfig,
    res: &Resources,
    k: usize,
    seed: u64,
    group_by: Option<GroupBy>,
) -> Result<CrossValOutcome> {
    mask.check_task(task)?;
    let prepared = prepare_task(corpus, task, mask, res)?;
    check_both_classes(task, &prepared.labels)?;
    let (cv, oof): (CvReport, OutOfFold) =
        cross_validate(&PreparedFolds(&prepared), &prepared.labels, k, seed, cfg)?;
    let p: Vec<(f64, f64, f64)> = (0..prepared.len())
        .map(|i| (oof.p_lr[i], oof.p_rf[i], oof.p_ensemble[i]))
        .collect();
    let pooled = report_from_predictions(corpus, task, &prepared.labels, &p, group_by)?;
    Ok(CrossValOutcome { cv, pooled })
}

/// Keeps the posts of one positive category plus every NEG post.
pub fn category_subset(corpus: &Corpus, category: Category) -> Corpus {
    Corpus {
        schema_version: corpus.schema_version,
        posts: corpus
            .posts
            .iter()
            .filter(|p| p.category == category || p.category == Category::NEG)
            .cloned()
            .collect(),
        base_dir: corpus.base_dir.clone(),
    }
}
