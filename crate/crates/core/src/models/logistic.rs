use serde::{Deserialize, Serialize};

use super::check_trainable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub learning_rate: f64,
    pub l2: f64,
    pub max_epochs: usize,
    /// Stop once the gradient's ∞-norm drops below this.
    pub tolerance: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            learning_rate: 0.1,
            l2: 1e-4,
            max_epochs: 1000,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Per-feature (mean, stddev) applied before the linear score.
    pub standardization: Vec<(f64, f64)>,
    pub config: LogisticConfig,
    pub loss_history: Vec<f64>,
}

impl LogisticModel {
    pub fn probability(&self, x: &[f64]) -> f64 {
        let z: f64 = self
            .weights
            .iter()
            .zip(x)
            .zip(&self.standardization)
            .map(|((w, v), (m, s))| w * (v - m) / s)
            .sum::<f64>()
            + self.bias;
        sigmoid(z)
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^z) without overflow.
pub(crate) fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Mean logistic loss plus `l2/2 · ‖w‖²` (bias unregularized), with its
/// gradient: `(∂/∂w, ∂/∂b)`.
pub fn logistic_loss_and_gradient(
    weights: &[f64],
    bias: f64,
    x: &[Vec<f64>],
    y: &[f64],
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; weights.len()];
    let mut gb = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        let z: f64 = weights.iter().zip(xi).map(|(w, v)| w * v).sum::<f64>() + bias;
        loss += softplus(z) - yi * z;
        let r = sigmoid(z) - yi;
        for (g, v) in gw.iter_mut().zip(xi) {
            *g += r * v;
        }
        gb += r;
    }
    let reg: f64 = weights.iter().map(|w| w * w).sum::<f64>();
    for (g, w) in gw.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    (loss / n + 0.5 * l2 * reg, gw, gb / n)
}

fn standardization(x: &[Vec<f64>], d: usize) -> Vec<(f64, f64)> {
    let n = x.len() as f64;
    (0..d)
        .map(|j| {
            let mean = x.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = x.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            (mean, if sd > 0.0 && sd.is_finite() { sd } else { 1.0 })
        })
        .collect()
}

/// Full-batch gradient descent on standardized inputs.
pub fn train_logistic(x: &[Vec<f64>], y: &[f64], cfg: &LogisticConfig) -> Result<LogisticModel> {
    let d = check_trainable(x, y, true)?;
    if cfg.learning_rate.is_nan() || cfg.learning_rate <= 0.0 || cfg.l2 < 0.0 {
        return Err(Error::argument(
            "logistic regression needs learning_rate > 0 and l2 >= 0",
        ));
    }
    let stats = standardization(x, d);
    let xs: Vec<Vec<f64>> = x
        .iter()
        .map(|r| r.iter().zip(&stats).map(|(v, (m, s))| (v - m) / s).collect())
        .collect();
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut history = Vec::new();
    for _ in 0..cfg.max_epochs {
        let (loss, gw, gb) = logistic_loss_and_gradient(&w, b, &xs, y, cfg.l2);
        history.push(loss);
        let gmax = gw.iter().fold(gb.abs(), |m, g| m.max(g.abs()));
        if gmax < cfg.tolerance {
            break;
        }
        for (wi, gi) in w.iter_mut().zip(&gw) {
            *wi -= cfg.learning_rate * gi;
        }
        b -= cfg.learning_rate * gb;
    }
    history.push(logistic_loss_and_gradient(&w, b, &xs, y, cfg.l2).0);
    Ok(LogisticModel {
        weights: w,
        bias: b,
        standardization: stats,
        config: *cfg,
        loss_history: history,
    })
}
