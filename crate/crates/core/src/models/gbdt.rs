//! Second-order gradient boosting of regression trees on logistic loss
//! with L2 leaf regularization (λ) and a per-leaf split penalty (γ).
//!
//! For the node sample set I with gradient sum G and hessian sum H the
//! optimal leaf weight is `-G / (H + λ)`, and a split into L/R gains
//! `½[G_L²/(H_L+λ) + G_R²/(H_R+λ) − G²/(H+λ)] − γ`.

use serde::{Deserialize, Serialize};

use super::check_trainable;
use super::logistic::{sigmoid, softplus};
use super::tree::{midpoint, sorted_by_feature, Tree, TreeNode, GAIN_TIE_EPS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbdtConfig {
    pub rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub lambda_l2: f64,
    pub gamma: f64,
    /// Minimum hessian sum on each side of a split.
    pub min_child_weight: f64,
}

impl Default for GbdtConfig {
    fn default() -> Self {
        GbdtConfig {
            rounds: 200,
            learning_rate: 0.1,
            max_depth: 4,
            lambda_l2: 1.0,
            gamma: 0.0,
            min_child_weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostedEnsemble {
    /// Leaves hold unshrunk weights `-G/(H+λ)`.
    pub trees: Vec<Tree>,
    pub base_score: f64,
    pub dimensionality: usize,
    pub config: GbdtConfig,
    /// Regularized objective after each round (index 0 = before any tree).
    pub objective_history: Vec<f64>,
}

impl BoostedEnsemble {
    pub fn raw_score(&self, x: &[f64]) -> f64 {
        self.base_score + self.config.learning_rate * self.trees.iter().map(|t| t.evaluate(x)).sum::<f64>()
    }

    pub fn probability(&self, x: &[f64]) -> f64 {
        sigmoid(self.raw_score(x))
    }
}

/// Logistic loss of raw score `f` against target `y` ∈ {0, 1}.
pub fn logistic_raw_loss(f: f64, y: f64) -> f64 {
    softplus(f) - y * f
}

/// First and second derivative of the logistic loss in the raw score.
pub fn gradient_hessian(f: f64, y: f64) -> (f64, f64) {
    let p = sigmoid(f);
    (p - y, p * (1.0 - p))
}

pub fn leaf_weight(g_sum: f64, h_sum: f64, lambda: f64) -> f64 {
    -g_sum / (h_sum + lambda)
}

pub fn split_gain(gl: f64, hl: f64, gr: f64, hr: f64, lambda: f64, gamma: f64) -> f64 {
    let score = |g: f64, h: f64| g * g / (h + lambda);
    0.5 * (score(gl, hl) + score(gr, hr) - score(gl + gr, hl + hr)) - gamma
}

struct Stats<'a> {
    g: &'a [f64],
    h: &'a [f64],
}

fn grow_regression_tree(x: &[Vec<f64>], stats: &Stats<'_>, d: usize, cfg: &GbdtConfig) -> Tree {
    let mut tree = Tree {
        nodes: vec![TreeNode::Leaf { value: 0.0 }],
        dimensionality: d,
    };
    let mut stack = vec![(0usize, (0..x.len()).collect::<Vec<usize>>(), 0usize)];
    while let Some((slot, idx, depth)) = stack.pop() {
        let g_sum: f64 = idx.iter().map(|&i| stats.g[i]).sum();
        let h_sum: f64 = idx.iter().map(|&i| stats.h[i]).sum();
        let mut best: Option<(f64, usize, f64)> = None;
        if depth < cfg.max_depth && idx.len() >= 2 {
            for f in 0..d {
                let order = sorted_by_feature(x, &idx, f);
                let (mut gl, mut hl) = (0.0, 0.0);
                for k in 0..order.len() - 1 {
                    gl += stats.g[order[k]];
                    hl += stats.h[order[k]];
                    let lo = x[order[k]][f];
                    let hi = x[order[k + 1]][f];
                    if lo == hi {
                        continue;
                    }
                    let (gr, hr) = (g_sum - gl, h_sum - hl);
                    if hl < cfg.min_child_weight || hr < cfg.min_child_weight {
                        continue;
                    }
                    let gain = split_gain(gl, hl, gr, hr, cfg.lambda_l2, cfg.gamma);
                    if gain > 0.0 && best.is_none_or(|b| gain > b.0 + GAIN_TIE_EPS) {
                        best = Some((gain, f, midpoint(lo, hi)));
                    }
                }
            }
        }
        match best {
            None => {
                tree.nodes[slot] = TreeNode::Leaf {
                    value: leaf_weight(g_sum, h_sum, cfg.lambda_l2),
                }
            }
            Some((_, feature, threshold)) => {
                let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| x[i][feature] <= threshold);
                let left = tree.nodes.len();
                let right = left + 1;
                tree.nodes.push(TreeNode::Leaf { value: 0.0 });
                tree.nodes.push(TreeNode::Leaf { value: 0.0 });
                tree.nodes[slot] = TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
                stack.push((right, r, depth + 1));
                stack.push((left, l, depth + 1));
            }
        }
    }
    tree
}

/// Objective = Σ loss + Σ_trees (γ·leaves + ½λ Σ (η·w)²), where η·w is the
/// leaf's effective contribution to the raw score.
fn tree_penalty(t: &Tree, cfg: &GbdtConfig) -> f64 {
    t.leaves()
        .map(|w| {
            let v = cfg.learning_rate * w;
            cfg.gamma + 0.5 * cfg.lambda_l2 * v * v
        })
        .sum()
}

pub fn train_gbdt(x: &[Vec<f64>], y: &[f64], cfg: &GbdtConfig) -> Result<BoostedEnsemble> {
    let d = check_trainable(x, y, true)?;
    if cfg.learning_rate.is_nan() || cfg.learning_rate <= 0.0 || cfg.lambda_l2 < 0.0 || cfg.gamma < 0.0 {
        return Err(Error::argument("GBDT needs learning_rate > 0, lambda >= 0, gamma >= 0"));
    }
    let n = x.len() as f64;
    let prior = y.iter().sum::<f64>() / n;
    let base_score = (prior / (1.0 - prior)).ln();
    let mut raw = vec![base_score; x.len()];
    let mut penalty = 0.0;
    let loss = |raw: &[f64]| raw.iter().zip(y).map(|(f, t)| logistic_raw_loss(*f, *t)).sum::<f64>();
    let mut history = vec![loss(&raw)];
    let mut trees = Vec::with_capacity(cfg.rounds);
    let mut g = vec![0.0; x.len()];
    let mut h = vec![0.0; x.len()];
    for _ in 0..cfg.rounds {
        for i in 0..x.len() {
            let (gi, hi) = gradient_hessian(raw[i], y[i]);
            g[i] = gi;
            h[i] = hi;
        }
        let tree = grow_regression_tree(x, &Stats { g: &g, h: &h }, d, cfg);
        for (i, r) in raw.iter_mut().enumerate() {
            *r += cfg.learning_rate * tree.evaluate(&x[i]);
        }
        penalty += tree_penalty(&tree, cfg);
        history.push(loss(&raw) + penalty);
        trees.push(tree);
    }
    Ok(BoostedEnsemble {
        trees,
        base_score,
        dimensionality: d,
        config: *cfg,
        objective_history: history,
    })
}
