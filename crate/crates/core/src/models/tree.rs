//! Binary tree arena shared by all tree learners, and CART with Gini
//! impurity.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::check_trainable;
use crate::error::Result;

/// Gains within this distance are considered tied; the earlier
/// (lower feature, lower threshold) candidate wins.
pub(crate) const GAIN_TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TreeNode {
    /// Samples with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// Class-1 fraction for classification trees, raw score for boosted trees.
    Leaf { value: f64 },
}

/// Nodes stored in an arena; the root is node 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
    pub dimensionality: usize,
}

impl Tree {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf { value } => return value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match t.nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + go(t, left).max(go(t, right)),
            }
        }
        go(self, 0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            TreeNode::Leaf { value } => Some(*value),
            _ => None,
        })
    }

    /// Structural check: indices in range, each non-root node referenced
    /// exactly once, features in range.
    pub fn validate(&self) -> bool {
        let mut refs = vec![0usize; self.nodes.len()];
        for n in &self.nodes {
            if let TreeNode::Split {
                feature, left, right, ..
            } = *n
            {
                if feature >= self.dimensionality || left >= self.nodes.len() || right >= self.nodes.len() {
                    return false;
                }
                refs[left] += 1;
                refs[right] += 1;
            }
        }
        !self.nodes.is_empty() && refs[0] == 0 && refs[1..].iter().all(|r| *r == 1)
    }
}

/// Sorted order of `indices` by feature `f`, ties by row index.
pub(crate) fn sorted_by_feature(x: &[Vec<f64>], indices: &[usize], f: usize) -> Vec<usize> {
    let mut order = indices.to_vec();
    order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
    order
}

/// Midpoint strictly below `hi` so that `lo` goes left and `hi` right.
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo + (hi - lo) / 2.0;
    if m >= hi {
        lo
    } else {
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: 8,
            min_leaf: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub tree: Tree,
    pub config: TreeConfig,
}

/// Gini impurity of a node with `positives` class-1 samples out of `n`.
pub fn gini(positives: f64, n: f64) -> f64 {
    if n <= 0.0 {
        return 0.0;
    }
    let p = positives / n;
    2.0 * p * (1.0 - p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GiniSplit {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

/// Best Gini split of the samples in `indices` over `features` (scanned in
/// the given order), honoring the minimum leaf size on both sides.
pub fn best_gini_split(
    x: &[Vec<f64>],
    y: &[f64],
    indices: &[usize],
    features: &[usize],
    min_leaf: usize,
) -> Option<GiniSplit> {
    let n = indices.len() as f64;
    let total_pos: f64 = indices.iter().map(|&i| y[i]).sum();
    let parent = gini(total_pos, n);
    let min_leaf = min_leaf.max(1);
    let mut best: Option<GiniSplit> = None;
    for &f in features {
        let order = sorted_by_feature(x, indices, f);
        let mut left_pos = 0.0;
        for k in 0..order.len() - 1 {
            left_pos += y[order[k]];
            let lo = x[order[k]][f];
            let hi = x[order[k + 1]][f];
            if lo == hi {
                continue;
            }
            let nl = k + 1;
            let nr = order.len() - nl;
            if nl < min_leaf || nr < min_leaf {
                continue;
            }
            let (nl, nr) = (nl as f64, nr as f64);
            let gain = parent - (nl / n) * gini(left_pos, nl) - (nr / n) * gini(total_pos - left_pos, nr);
            if best.is_none_or(|b| gain > b.gain + GAIN_TIE_EPS) {
                best = Some(GiniSplit {
                    feature: f,
                    threshold: midpoint(lo, hi),
                    gain,
                });
            }
        }
    }
    best
}

/// Feature candidates at each split: all features, or a fresh random
/// subset of fixed size.
pub(crate) enum FeatureChoice<'r, R: Rng> {
    All,
    Subset { per_split: usize, rng: &'r mut R },
}

pub(crate) fn grow_cart<R: Rng>(
    x: &[Vec<f64>],
    y: &[f64],
    indices: Vec<usize>,
    dimensionality: usize,
    cfg: &TreeConfig,
    mut features: FeatureChoice<'_, R>,
) -> Tree {
    let mut tree = Tree {
        nodes: Vec::new(),
        dimensionality,
    };
    // (node slot, samples, depth)
    let mut stack = vec![(0usize, indices, 0usize)];
    tree.nodes.push(TreeNode::Leaf { value: 0.0 });
    while let Some((slot, idx, depth)) = stack.pop() {
        let pos: f64 = idx.iter().map(|&i| y[i]).sum();
        let frac = pos / idx.len() as f64;
        let pure = pos == 0.0 || pos == idx.len() as f64;
        let can_split = !pure && depth < cfg.max_depth && idx.len() >= 2 * cfg.min_leaf.max(1);
        let split = if can_split {
            let cand: Vec<usize> = match &mut features {
                FeatureChoice::All => (0..dimensionality).collect(),
                FeatureChoice::Subset { per_split, rng } => {
                    let mut c = sample(*rng, dimensionality, (*per_split).min(dimensionality)).into_vec();
                    c.sort_unstable();
                    c
                }
            };
            best_gini_split(x, y, &idx, &cand, cfg.min_leaf)
        } else {
            None
        };
        match split {
            None => tree.nodes[slot] = TreeNode::Leaf { value: frac },
            Some(s) => {
                let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| x[i][s.feature] <= s.threshold);
                let left = tree.nodes.len();
                let right = left + 1;
                tree.nodes.push(TreeNode::Leaf { value: 0.0 });
                tree.nodes.push(TreeNode::Leaf { value: 0.0 });
                tree.nodes[slot] = TreeNode::Split {
                    feature: s.feature,
                    threshold: s.threshold,
                    left,
                    right,
                };
                // right pushed first so the left subtree is expanded first
                stack.push((right, r, depth + 1));
                stack.push((left, l, depth + 1));
            }
        }
    }
    tree
}

/// CART over all features and all samples.
pub fn train_tree(x: &[Vec<f64>], y: &[f64], cfg: &TreeConfig) -> Result<DecisionTree> {
    let d = check_trainable(x, y, false)?;
    let tree = grow_cart::<rand_chacha::ChaCha8Rng>(x, y, (0..x.len()).collect(), d, cfg, FeatureChoice::All);
    Ok(DecisionTree { tree, config: *cfg })
}
