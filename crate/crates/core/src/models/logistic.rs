use serde::{Deserialize, Serialize};

use super::matrix::CsrMatrix;
use super::optim::gradient_descent;
use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRegConfig {
    pub l2_lambda: f64,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            l2_lambda: 1e-2,
            tol: 1e-6,
            max_iters: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub l2_lambda: f64,
    pub n_iters_run: usize,
}

/// Per-step record of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRegTrace {
    pub losses: Vec<f64>,
    pub converged: bool,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Mean log-loss plus `(λ/2)·‖w‖²` at `params = [w..., b]`; writes the
/// gradient into `grad`. The bias is not regularized.
pub fn logistic_objective(
    x: &CsrMatrix,
    y: &[bool],
    l2_lambda: f64,
    params: &[f64],
    grad: &mut [f64],
) -> f64 {
    let d = x.n_cols();
    let (w, b) = (&params[..d], params[d]);
    let n = x.n_rows() as f64;
    grad.iter_mut().for_each(|g| *g = 0.0);
    let mut loss = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        let z = x.row_dot(i, w) + b;
        let t = if yi { 1.0 } else { 0.0 };
        loss += softplus(z) - t * z;
        let r = (sigmoid(z) - t) / n;
        let (idx, vals) = x.row(i);
        for (&j, v) in idx.iter().zip(vals) {
            grad[j as usize] += r * v;
        }
        grad[d] += r;
    }
    loss /= n;
    let mut reg = 0.0;
    for (g, wj) in grad[..d].iter_mut().zip(w) {
        *g += l2_lambda * wj;
        reg += wj * wj;
    }
    loss + 0.5 * l2_lambda * reg
}

pub(crate) fn check_training_data(x: &CsrMatrix, y: &[bool]) -> Result<(), ModelError> {
    if x.n_rows() != y.len() {
        return Err(ModelError::LengthMismatch {
            expected: x.n_rows(),
            found: y.len(),
        });
    }
    if y.len() < 2 {
        return Err(ModelError::TooFewSamples(y.len()));
    }
    if y.iter().all(|&v| v) || y.iter().all(|&v| !v) {
        return Err(ModelError::SingleClass);
    }
    if !x.all_finite() {
        return Err(ModelError::NonFinite);
    }
    Ok(())
}

/// Trains binary logistic regression by gradient descent from zero weights.
pub fn train_logistic(
    x: &CsrMatrix,
    y: &[bool],
    cfg: &LogRegConfig,
) -> Result<(LogRegModel, LogRegTrace), ModelError> {
    check_training_data(x, y)?;
    let d = x.n_cols();
    let run = gradient_descent(
        |p, g| logistic_objective(x, y, cfg.l2_lambda, p, g),
        vec![0.0; d + 1],
        cfg.tol,
        cfg.max_iters,
    );
    let mut params = run.x;
    let bias = params.pop().expect("bias slot");
    Ok((
        LogRegModel {
            weights: params,
            bias,
            l2_lambda: cfg.l2_lambda,
            n_iters_run: run.iterations,
        },
        LogRegTrace {
            losses: run.losses,
            converged: run.converged,
        },
    ))
}

impl LogRegModel {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn predict_csr_row(&self, x: &CsrMatrix, i: usize) -> f64 {
        sigmoid(x.row_dot(i, &self.weights) + self.bias)
    }

    pub fn predict_csr(&self, x: &CsrMatrix) -> Vec<f64> {
        (0..x.n_rows())
            .map(|i| self.predict_csr_row(x, i))
            .collect()
    }
}

/// `sigmoid(w·x + b)`.
pub fn logistic_predict(m: &LogRegModel, x: &[f64]) -> Result<f64, ModelError> {
    if x.len() != m.dim() {
        return Err(ModelError::DimensionMismatch {
            expected: m.dim(),
            found: x.len(),
        });
    }
    let z: f64 = m.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + m.bias;
    Ok(sigmoid(z))
}
