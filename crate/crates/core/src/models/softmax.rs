//! Multinomial logistic regression, trained with the same descent routine as
//! the binary model.

use serde::{Deserialize, Serialize};

use super::matrix::CsrMatrix;
use super::optim::gradient_descent;
use super::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxModel {
    pub n_classes: usize,
    pub dim: usize,
    /// Row-major `n_classes × dim`.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

/// Mean cross-entropy plus `(λ/2)·‖W‖²`. Parameters are `[W (k×d), b (k)]`.
pub fn softmax_objective(
    x: &CsrMatrix,
    y: &[usize],
    n_classes: usize,
    l2_lambda: f64,
    params: &[f64],
    grad: &mut [f64],
) -> f64 {
    let d = x.n_cols();
    let (w, b) = params.split_at(n_classes * d);
    let n = x.n_rows() as f64;
    grad.iter_mut().for_each(|g| *g = 0.0);
    let mut loss = 0.0;
    let mut z = vec![0.0; n_classes];
    for (i, &yi) in y.iter().enumerate() {
        for (c, zc) in z.iter_mut().enumerate() {
            *zc = x.row_dot(i, &w[c * d..(c + 1) * d]) + b[c];
        }
        softmax_in_place(&mut z);
        loss -= z[yi].max(f64::MIN_POSITIVE).ln();
        let (idx, vals) = x.row(i);
        for (c, &p) in z.iter().enumerate() {
            let r = (p - if c == yi { 1.0 } else { 0.0 }) / n;
            for (&j, v) in idx.iter().zip(vals) {
                grad[c * d + j as usize] += r * v;
            }
            grad[n_classes * d + c] += r;
        }
    }
    loss /= n;
    let mut reg = 0.0;
    for (g, wj) in grad[..n_classes * d].iter_mut().zip(w) {
        *g += l2_lambda * wj;
        reg += wj * wj;
    }
    loss + 0.5 * l2_lambda * reg
}

pub fn train_softmax(
    x: &CsrMatrix,
    y: &[usize],
    n_classes: usize,
    l2_lambda: f64,
    tol: f64,
    max_iters: usize,
) -> Result<SoftmaxModel, ModelError> {
    if x.n_rows() != y.len() {
        return Err(ModelError::LengthMismatch {
            expected: x.n_rows(),
            found: y.len(),
        });
    }
    if y.is_empty() {
        return Err(ModelError::TooFewSamples(0));
    }
    if let Some(&bad) = y.iter().find(|&&c| c >= n_classes) {
        return Err(ModelError::InvalidConfig(format!(
            "class index {bad} >= {n_classes}"
        )));
    }
    if !x.all_finite() {
        return Err(ModelError::NonFinite);
    }
    let d = x.n_cols();
    let run = gradient_descent(
        |p, g| softmax_objective(x, y, n_classes, l2_lambda, p, g),
        vec![0.0; n_classes * (d + 1)],
        tol,
        max_iters,
    );
    let mut weights = run.x;
    let biases = weights.split_off(n_classes * d);
    Ok(SoftmaxModel {
        n_classes,
        dim: d,
        weights,
        biases,
    })
}

impl SoftmaxModel {
    /// Class distribution for a sparse row given as `(index, value)` pairs.
    pub fn predict_sparse(&self, row: &[(usize, f64)]) -> Vec<f64> {
        let mut z: Vec<f64> = (0..self.n_classes)
            .map(|c| {
                let w = &self.weights[c * self.dim..(c + 1) * self.dim];
                row.iter().map(|&(j, v)| w[j] * v).sum::<f64>() + self.biases[c]
            })
            .collect();
        softmax_in_place(&mut z);
        z
    }
}
