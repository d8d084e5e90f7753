//! Multinomial (softmax) logistic regression.
//!
//! Minimizes mean softmax cross-entropy plus an `(l2/2)·‖W‖²` ridge penalty
//! (bias unregularized) with full-batch gradient descent and Armijo
//! backtracking from zero initialization. The objective is convex, so the
//! optimizer choice only affects how fast — not where — it converges;
//! backtracking keeps the loss monotone non-increasing, which the tests
//! rely on.

use serde::{Deserialize, Serialize};

use super::{softmax_in_place, Prediction};
use crate::error::{Error, Result};
use crate::features::SparseVector;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LrConfig {
    pub max_iter: usize,
    /// Convergence threshold on the gradient max-norm.
    pub tol: f64,
    /// Ridge strength; `None` means the weak default `1/n_samples`.
    pub l2: Option<f64>,
}

impl Default for LrConfig {
    fn default() -> Self {
        LrConfig {
            max_iter: 1000,
            tol: 1e-6,
            l2: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OptimizerReport {
    pub iterations: usize,
    pub final_grad_norm: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LrModel {
    /// `weights[c][j]`, one row per class.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub report: OptimizerReport,
}

impl LrModel {
    pub fn n_classes(&self) -> usize {
        self.bias.len()
    }

    pub fn n_features(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn predict(&self, x: &SparseVector) -> Result<Prediction> {
        if x.dims() != self.n_features() {
            return Err(Error::Shape {
                expected: self.n_features(),
                got: x.dims(),
            });
        }
        let mut scores = logits(&self.weights, &self.bias, x);
        let class = softmax_in_place(&mut scores);
        Ok(Prediction {
            class,
            probabilities: scores,
        })
    }
}

fn logits(weights: &[Vec<f64>], bias: &[f64], x: &SparseVector) -> Vec<f64> {
    bias.iter()
        .enumerate()
        .map(|(c, &b)| {
            let mut z = b;
            for &(j, count) in x.entries() {
                z += weights[c][j] * count as f64;
            }
            z
        })
        .collect()
}

/// Mean cross-entropy loss plus ridge penalty, with its analytic gradient.
/// Exposed so tests can check the gradient against finite differences.
pub fn loss_and_gradient(
    x: &[SparseVector],
    y: &[usize],
    weights: &[Vec<f64>],
    bias: &[f64],
    l2: f64,
) -> (f64, Vec<Vec<f64>>, Vec<f64>) {
    let n = x.len() as f64;
    let n_classes = bias.len();
    let n_features = weights.first().map_or(0, Vec::len);
    let mut loss = 0.0;
    let mut grad_w = vec![vec![0.0; n_features]; n_classes];
    let mut grad_b = vec![0.0; n_classes];

    for (xi, &yi) in x.iter().zip(y) {
        let z = logits(weights, bias, xi);
        let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let log_norm = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        loss += (log_norm - z[yi]) / n;
        for c in 0..n_classes {
            let p = (z[c] - log_norm).exp();
            let coeff = (p - if c == yi { 1.0 } else { 0.0 }) / n;
            grad_b[c] += coeff;
            for &(j, count) in xi.entries() {
                grad_w[c][j] += coeff * count as f64;
            }
        }
    }

    for (c, row) in weights.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            loss += 0.5 * l2 * w * w;
            grad_w[c][j] += l2 * w;
        }
    }
    (loss, grad_w, grad_b)
}

fn grad_max_norm(grad_w: &[Vec<f64>], grad_b: &[f64]) -> f64 {
    grad_w
        .iter()
        .flatten()
        .chain(grad_b.iter())
        .fold(0.0f64, |m, &g| m.max(g.abs()))
}

fn grad_sq_norm(grad_w: &[Vec<f64>], grad_b: &[f64]) -> f64 {
    grad_w
        .iter()
        .flatten()
        .chain(grad_b.iter())
        .map(|&g| g * g)
        .sum()
}

/// Trains the softmax regression model.
pub fn train_lr(
    x: &[SparseVector],
    y: &[usize],
    n_classes: usize,
    config: LrConfig,
) -> Result<LrModel> {
    train_lr_traced(x, y, n_classes, config).map(|(model, _)| model)
}

/// Like [`train_lr`] but also returns the loss after every accepted step
/// (index 0 is the zero-initialization loss), for convergence checks.
pub fn train_lr_traced(
    x: &[SparseVector],
    y: &[usize],
    n_classes: usize,
    config: LrConfig,
) -> Result<(LrModel, Vec<f64>)> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::Training(format!(
            "need equal non-zero sample counts, got {} features / {} labels",
            x.len(),
            y.len()
        )));
    }
    if n_classes < 2 {
        return Err(Error::Config("need at least 2 classes".into()));
    }
    let n_features = x[0].dims();
    if let Some(bad) = x.iter().find(|v| v.dims() != n_features) {
        return Err(Error::Shape {
            expected: n_features,
            got: bad.dims(),
        });
    }
    if let Some(&bad) = y.iter().find(|&&c| c >= n_classes) {
        return Err(Error::Training(format!(
            "label {bad} out of range for {n_classes} classes"
        )));
    }
    let l2 = match config.l2 {
        Some(v) if v >= 0.0 && v.is_finite() => v,
        Some(v) => return Err(Error::Config(format!("l2 must be >= 0, got {v}"))),
        None => 1.0 / x.len() as f64,
    };

    let mut weights = vec![vec![0.0; n_features]; n_classes];
    let mut bias = vec![0.0; n_classes];
    let (mut loss, mut grad_w, mut grad_b) = loss_and_gradient(x, y, &weights, &bias, l2);
    let mut trace = vec![loss];
    let mut step = 1.0f64;
    let mut iterations = 0;
    let mut converged = false;

    const ARMIJO_C: f64 = 1e-4;

    for iter in 0..config.max_iter {
        if !loss.is_finite() {
            return Err(Error::Divergence(format!("non-finite loss at iter {iter}")));
        }
        let gnorm = grad_max_norm(&grad_w, &grad_b);
        if gnorm <= config.tol {
            converged = true;
            break;
        }
        let gsq = grad_sq_norm(&grad_w, &grad_b);

        // Backtracking line search along the negative gradient.
        step = (step * 2.0).min(1e6);
        let mut accepted = false;
        while step > 1e-18 {
            let cand_w: Vec<Vec<f64>> = weights
                .iter()
                .zip(&grad_w)
                .map(|(wr, gr)| wr.iter().zip(gr).map(|(w, g)| w - step * g).collect())
                .collect();
            let cand_b: Vec<f64> = bias.iter().zip(&grad_b).map(|(b, g)| b - step * g).collect();
            let (cand_loss, cand_gw, cand_gb) = loss_and_gradient(x, y, &cand_w, &cand_b, l2);
            if cand_loss.is_finite() && cand_loss <= loss - ARMIJO_C * step * gsq {
                weights = cand_w;
                bias = cand_b;
                loss = cand_loss;
                grad_w = cand_gw;
                grad_b = cand_gb;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        iterations = iter + 1;
        if !accepted {
            break; // step size underflow: as converged as f64 allows
        }
        trace.push(loss);
    }

    let final_grad_norm = grad_max_norm(&grad_w, &grad_b);
    if final_grad_norm <= config.tol {
        converged = true;
    }
    let model = LrModel {
        weights,
        bias,
        report: OptimizerReport {
            iterations,
            final_grad_norm,
            converged,
        },
    };
    Ok((model, trace))
}
