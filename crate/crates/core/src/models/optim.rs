//! Full-batch gradient descent with Armijo backtracking.

/// Sufficient-decrease constant.
const ARMIJO_C: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct Descent {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Objective at the start point and after every accepted step.
    pub losses: Vec<f64>,
    pub converged: bool,
}

/// Minimizes `objective`, which writes the gradient into its second argument
/// and returns the value.
///
/// Each iteration tries a step twice as long as the last accepted one and
/// halves it until the Armijo condition holds, so accepted steps strictly
/// decrease the objective. Stops once the gradient's infinity norm drops
/// below `tol`, after `max_iters` steps, or when no step length decreases
/// the objective.
pub fn gradient_descent<F>(mut objective: F, x0: Vec<f64>, tol: f64, max_iters: usize) -> Descent
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let mut x = x0;
    let mut grad = vec![0.0; x.len()];
    let mut trial = vec![0.0; x.len()];
    let mut trial_grad = vec![0.0; x.len()];
    let mut f = objective(&x, &mut grad);
    let mut losses = vec![f];
    let mut step = 1.0;

    for iter in 0..max_iters {
        let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gmax < tol {
            return Descent {
                x,
                iterations: iter,
                losses,
                converged: true,
            };
        }
        let gsq: f64 = grad.iter().map(|g| g * g).sum();
        let mut t = step * 2.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            for ((xt, xi), gi) in trial.iter_mut().zip(&x).zip(&grad) {
                *xt = xi - t * gi;
            }
            let ft = objective(&trial, &mut trial_grad);
            if ft.is_finite() && ft <= f - ARMIJO_C * t * gsq {
                accepted = Some(ft);
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some(ft) => {
                std::mem::swap(&mut x, &mut trial);
                std::mem::swap(&mut grad, &mut trial_grad);
                f = ft;
                step = t;
                losses.push(f);
            }
            None => {
                return Descent {
                    x,
                    iterations: iter,
                    losses,
                    converged: true,
                }
            }
        }
    }
    let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    Descent {
        x,
        iterations: max_iters,
        losses,
        converged: gmax < tol,
    }
}
