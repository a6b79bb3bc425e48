use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::check_trainable;
use super::tree::{grow_cart, FeatureChoice, Tree, TreeConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub tree: TreeConfig,
    /// Candidate features per split; `None` means ⌈√d⌉.
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            tree: TreeConfig::default(),
            features_per_split: None,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub per_tree_seeds: Vec<u64>,
    pub features_per_split: usize,
    pub dimensionality: usize,
    pub config: ForestConfig,
}

impl ForestModel {
    /// Mean of the tree scores.
    pub fn probability(&self, x: &[f64]) -> f64 {
        if self.trees.is_empty() {
            return 0.5;
        }
        self.trees.iter().map(|t| t.evaluate(x)).sum::<f64>() / self.trees.len() as f64
    }
}

/// `seed` drives a master stream that hands each tree its own seed; trees
/// are then grown independently (and in parallel) from those seeds.
pub fn train_forest(x: &[Vec<f64>], y: &[f64], cfg: &ForestConfig, seed: u64) -> Result<ForestModel> {
    let d = check_trainable(x, y, false)?;
    if cfg.n_trees == 0 {
        return Err(Error::argument("forest needs at least one tree"));
    }
    let per_split = cfg
        .features_per_split
        .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
        .clamp(1, d.max(1));
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..cfg.n_trees).map(|_| master.gen()).collect();
    let n = x.len();
    let trees: Vec<Tree> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let idx: Vec<usize> = if cfg.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let choice = if per_split >= d {
                FeatureChoice::All
            } else {
                FeatureChoice::Subset {
                    per_split,
                    rng: &mut rng,
                }
            };
            grow_cart(x, y, idx, d, &cfg.tree, choice)
        })
        .collect();
    Ok(ForestModel {
        trees,
        per_tree_seeds: seeds,
        features_per_split: per_split,
        dimensionality: d,
        config: *cfg,
    })
}
