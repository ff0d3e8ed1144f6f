use serde::{Deserialize, Serialize};

use super::forest::{train_forest, ForestConfig, ForestModel};
use super::logistic::{train_logistic, LogRegConfig, LogRegModel};
use super::matrix::CsrMatrix;
use super::metrics::binary_cross_entropy;
use super::ModelError;
use crate::corpus::stratified_holdout;

const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleWeights {
    pub w1: f64,
    pub w2: f64,
}

impl EnsembleWeights {
    /// Checks `w1 + w2 = 1` and both in `[0.1, 0.9]`.
    pub fn new(w1: f64, w2: f64) -> Result<Self, ModelError> {
        let ok = (w1 + w2 - 1.0).abs() <= WEIGHT_TOL
            && (0.1 - WEIGHT_TOL..=0.9 + WEIGHT_TOL).contains(&w1)
            && (0.1 - WEIGHT_TOL..=0.9 + WEIGHT_TOL).contains(&w2);
        if ok {
            Ok(EnsembleWeights { w1, w2 })
        } else {
            Err(ModelError::InvalidWeights { w1, w2 })
        }
    }

    /// Grid point `w1 = i/10`.
    pub fn grid(i: u32) -> Self {
        let w1 = f64::from(i) / 10.0;
        EnsembleWeights { w1, w2: 1.0 - w1 }
    }
}

/// How the two base probabilities become one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoteMode {
    /// `w1·p_lr + w2·p_rf`.
    #[default]
    Soft,
    /// Agreeing labels keep the soft probability; on disagreement LR's
    /// probability (and so its label) wins.
    Hard,
}

/// `w1·p_lr + w2·p_rf`, evaluated as `p_rf + w1·(p_lr − p_rf)` so equal
/// inputs pass through unchanged.
pub fn ensemble_predict(w: &EnsembleWeights, p_lr: f64, p_rf: f64) -> f64 {
    let p = p_rf + w.w1 * (p_lr - p_rf);
    p.clamp(p_lr.min(p_rf), p_lr.max(p_rf))
}

pub fn combine(mode: VoteMode, w: &EnsembleWeights, p_lr: f64, p_rf: f64) -> f64 {
    match mode {
        VoteMode::Soft => ensemble_predict(w, p_lr, p_rf),
        VoteMode::Hard => {
            if (p_lr >= 0.5) == (p_rf >= 0.5) {
                ensemble_predict(w, p_lr, p_rf)
            } else {
                p_lr
            }
        }
    }
}

/// Per-grid-point cross-entropy for `w1 = 0.1, …, 0.9`.
pub fn weight_grid_losses(
    p_lr: &[f64],
    p_rf: &[f64],
    y: &[bool],
) -> Result<Vec<(EnsembleWeights, f64)>, ModelError> {
    if p_lr.len() != p_rf.len() || p_lr.len() != y.len() {
        return Err(ModelError::LengthMismatch {
            expected: y.len(),
            found: if p_lr.len() != y.len() {
                p_lr.len()
            } else {
                p_rf.len()
            },
        });
    }
    if y.is_empty() {
        return Err(ModelError::Empty);
    }
    (1..=9)
        .map(|i| {
            let w = EnsembleWeights::grid(i);
            let p: Vec<f64> = p_lr
                .iter()
                .zip(p_rf)
                .map(|(&a, &b)| ensemble_predict(&w, a, b))
                .collect();
            binary_cross_entropy(y, &p).map(|ce| (w, ce))
        })
        .collect()
}

/// Grid argmin of cross-entropy; ties go to the larger `w1`.
pub fn ensemble_weight_search(
    p_lr: &[f64],
    p_rf: &[f64],
    y: &[bool],
) -> Result<EnsembleWeights, ModelError> {
    let grid = weight_grid_losses(p_lr, p_rf, y)?;
    let mut best = grid[8];
    for &(w, ce) in grid[..8].iter().rev() {
        if ce < best.1 {
            best = (w, ce);
        }
    }
    Ok(best.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub lr: LogRegConfig,
    pub rf: ForestConfig,
    pub vote: VoteMode,
    /// Fraction of the training rows held out for weight selection.
    pub holdout: f64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            lr: LogRegConfig::default(),
            rf: ForestConfig::default(),
            vote: VoteMode::Soft,
            holdout: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleFit {
    pub lr: LogRegModel,
    pub rf: ForestModel,
    pub weights: EnsembleWeights,
}

/// Picks weights with base models fit on an inner stratified split, then
/// refits both base models on every row. `x_lr` and `x_rf` hold the same rows
/// in the views each model consumes.
pub fn fit_ensemble(
    x_lr: &CsrMatrix,
    x_rf: &CsrMatrix,
    y: &[bool],
    cfg: &EnsembleConfig,
    seed: u64,
) -> Result<EnsembleFit, ModelError> {
    if x_lr.n_rows() != x_rf.n_rows() {
        return Err(ModelError::LengthMismatch {
            expected: x_lr.n_rows(),
            found: x_rf.n_rows(),
        });
    }
    let (inner, held) = stratified_holdout(y, cfg.holdout, seed);
    let weights = if held.is_empty() || inner.is_empty() {
        EnsembleWeights::grid(9)
    } else {
        let y_in: Vec<bool> = inner.iter().map(|&i| y[i]).collect();
        let y_held: Vec<bool> = held.iter().map(|&i| y[i]).collect();
        let (lr, _) = train_logistic(&x_lr.select_rows(&inner), &y_in, &cfg.lr)?;
        let rf = train_forest(&x_rf.select_rows(&inner), &y_in, &cfg.rf, seed)?;
        let p_lr = lr.predict_csr(&x_lr.select_rows(&held));
        let p_rf = rf.predict_csr(&x_rf.select_rows(&held));
        ensemble_weight_search(&p_lr, &p_rf, &y_held)?
    };
    let (lr, _) = train_logistic(x_lr, y, &cfg.lr)?;
    let rf = train_forest(x_rf, y, &cfg.rf, seed)?;
    Ok(EnsembleFit { lr, rf, weights })
}

impl EnsembleFit {
    /// `(p_lr, p_rf, p_ensemble)` per row.
    pub fn predict(
        &self,
        x_lr: &CsrMatrix,
        x_rf: &CsrMatrix,
        vote: VoteMode,
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let p_lr = self.lr.predict_csr(x_lr);
        let p_rf = self.rf.predict_csr(x_rf);
        let p_en = p_lr
            .iter()
            .zip(&p_rf)
            .map(|(&a, &b)| combine(vote, &self.weights, a, b))
            .collect();
        (p_lr, p_rf, p_en)
    }
}
