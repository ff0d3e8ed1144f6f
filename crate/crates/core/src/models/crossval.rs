//! Stratified k-fold cross-validation of LR, RF and their ensemble.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ensemble::{fit_ensemble, EnsembleConfig, EnsembleWeights};
use super::matrix::CsrMatrix;
use super::metrics::{compute_metrics, Metrics};
use crate::corpus::stratified_folds_for_labels;
use crate::Result;

/// Per-fold design matrices. LR sees the standardized view and RF the raw
/// one; both must be fitted on `train` rows only.
pub struct FoldMatrices {
    pub lr_train: CsrMatrix,
    pub lr_test: CsrMatrix,
    pub rf_train: CsrMatrix,
    pub rf_test: CsrMatrix,
}

pub trait FoldFeaturizer: Sync {
    fn featurize(&self, train: &[usize], test: &[usize]) -> Result<FoldMatrices>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub weights: EnsembleWeights,
    pub lr: Metrics,
    pub rf: Metrics,
    pub ensemble: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<FoldResult>,
    pub mean_lr: Metrics,
    pub mean_rf: Metrics,
    pub mean_ensemble: Metrics,
}

/// Test-fold predictions for every item, filled in by [`cross_validate`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutOfFold {
    pub p_lr: Vec<f64>,
    pub p_rf: Vec<f64>,
    pub p_ensemble: Vec<f64>,
}

/// Runs k-fold CV. Folds are processed in parallel but every fold's result
/// depends only on `(labels, k, seed, config)`.
pub fn cross_validate(
    featurizer: &dyn FoldFeaturizer,
    labels: &[bool],
    k: usize,
    seed: u64,
    cfg: &EnsembleConfig,
) -> Result<(CvReport, OutOfFold)> {
    let folds = stratified_folds_for_labels(labels, k, seed)?;
    let results: Vec<Result<(FoldResult, Vec<(usize, [f64; 3])>)>> = folds
        .par_iter()
        .enumerate()
        .map(|(f, test)| {
            let mut in_test = vec![false; labels.len()];
            for &i in test {
                in_test[i] = true;
            }
            let train: Vec<usize> = (0..labels.len()).filter(|&i| !in_test[i]).collect();
            let m = featurizer.featurize(&train, test)?;
            let y_train: Vec<bool> = train.iter().map(|&i| labels[i]).collect();
            let y_test: Vec<bool> = test.iter().map(|&i| labels[i]).collect();
            let fit = fit_ensemble(&m.lr_train, &m.rf_train, &y_train, cfg, seed ^ f as u64)?;
            let (p_lr, p_rf, p_en) = fit.predict(&m.lr_test, &m.rf_test, cfg.vote);
            let preds = test
                .iter()
                .enumerate()
                .map(|(j, &i)| (i, [p_lr[j], p_rf[j], p_en[j]]))
                .collect();
            Ok((
                FoldResult {
                    fold: f,
                    n_train: train.len(),
                    n_test: test.len(),
                    weights: fit.weights,
                    lr: compute_metrics(&y_test, &p_lr, 0.5)?,
                    rf: compute_metrics(&y_test, &p_rf, 0.5)?,
                    ensemble: compute_metrics(&y_test, &p_en, 0.5)?,
                },
                preds,
            ))
        })
        .collect();

    let mut fold_results = Vec::with_capacity(k);
    let mut oof = OutOfFold {
        p_lr: vec![f64::NAN; labels.len()],
        p_rf: vec![f64::NAN; labels.len()],
        p_ensemble: vec![f64::NAN; labels.len()],
    };
    for r in results {
        let (fr, preds) = r?;
        for (i, [a, b, c]) in preds {
            oof.p_lr[i] = a;
            oof.p_rf[i] = b;
            oof.p_ensemble[i] = c;
        }
        fold_results.push(fr);
    }
    let mean = |f: fn(&FoldResult) -> &Metrics| {
        let all: Vec<Metrics> = fold_results.iter().map(|r| f(r).clone()).collect();
        Metrics::mean(&all).expect("k >= 2 folds")
    };
    let report = CvReport {
        k,
        seed,
        mean_lr: mean(|r| &r.lr),
        mean_rf: mean(|r| &r.rf),
        mean_ensemble: mean(|r| &r.ensemble),
        folds: fold_results,
    };
    Ok((report, oof))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::forest::ForestConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    struct Fixed(CsrMatrix);

    impl FoldFeaturizer for Fixed {
        fn featurize(&self, train: &[usize], test: &[usize]) -> Result<FoldMatrices> {
            Ok(FoldMatrices {
                lr_train: self.0.select_rows(train),
                lr_test: self.0.select_rows(test),
                rf_train: self.0.select_rows(train),
                rf_test: self.0.select_rows(test),
            })
        }
    }

    fn blobs(n: usize) -> (CsrMatrix, Vec<bool>) {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let pos = i % 2 == 0;
            let c = if pos { 1.5 } else { -1.5 };
            rows.push(vec![
                c + rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ]);
            y.push(pos);
        }
        (CsrMatrix::from_dense(&rows), y)
    }

    fn cfg() -> EnsembleConfig {
        EnsembleConfig {
            rf: ForestConfig {
                n_trees: 15,
                ..ForestConfig::default()
            },
            ..EnsembleConfig::default()
        }
    }

    #[test]
    fn k_folds_reported_and_deterministic() {
        let (x, y) = blobs(100);
        let (a, oof) = cross_validate(&Fixed(x.clone()), &y, 5, 3, &cfg()).unwrap();
        assert_eq!(a.folds.len(), 5);
        assert_eq!(a.folds.iter().map(|f| f.n_test).sum::<usize>(), 100);
        assert!(oof.p_ensemble.iter().all(|p| p.is_finite()));
        assert!(a.mean_ensemble.accuracy > 0.9);
        let (b, _) = cross_validate(&Fixed(x), &y, 5, 3, &cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn too_many_folds_is_an_error() {
        let (x, y) = blobs(6);
        assert!(cross_validate(&Fixed(x), &y, 10, 0, &cfg()).is_err());
    }
}
