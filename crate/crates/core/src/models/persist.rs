//! Line-oriented text model files.
//!
//! ```text
//! lyrimeter-model 1
//! kind gbdt
//! seed 42
//! features overall,repeat:10,100,1000:count,mean,mode
//! ...
//! end
//! ```
//!
//! Every real number is written with 17 significant digits, which
//! round-trips IEEE doubles exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::forest::{ForestConfig, ForestModel};
use super::gbdt::{BoostedEnsemble, GbdtConfig};
use super::logistic::{LogisticConfig, LogisticModel};
use super::tree::{DecisionTree, Tree, TreeConfig, TreeNode};
use super::{ModelKind, TrainedModel};
use crate::error::{Error, Result};
use crate::features::{FeatureOptions, FeatureSpec};
use crate::patterning::{PatterningConfig, SecondaryStress};

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "lyrimeter-model";

/// A trained model together with the featurization it was trained on.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub model: TrainedModel,
    pub features: FeatureSpec,
    pub options: FeatureOptions,
    pub patterning: PatterningConfig,
    pub seed: u64,
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn reals(vs: impl IntoIterator<Item = f64>) -> String {
    vs.into_iter().map(real).collect::<Vec<_>>().join(" ")
}

fn write_tree(out: &mut String, t: &Tree) {
    let _ = writeln!(out, "tree {}", t.nodes.len());
    for n in &t.nodes {
        match *n {
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                let _ = writeln!(out, "split {feature} {} {left} {right}", real(threshold));
            }
            TreeNode::Leaf { value } => {
                let _ = writeln!(out, "leaf {}", real(value));
            }
        }
    }
}

fn write_tree_config(out: &mut String, prefix: &str, c: &TreeConfig) {
    let _ = writeln!(out, "hyper {prefix}max_depth {}", c.max_depth);
    let _ = writeln!(out, "hyper {prefix}min_leaf {}", c.min_leaf);
}

impl ModelBundle {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC} {MODEL_FORMAT_VERSION}");
        let _ = writeln!(out, "kind {}", self.model.kind());
        let _ = writeln!(out, "seed {}", self.seed);
        let _ = writeln!(out, "features {}", self.features);
        let _ = writeln!(out, "noise_removal {}", self.options.noise_removal);
        let _ = writeln!(out, "repeat_statistic {}", self.options.repeat_statistic);
        let secondary = match self.patterning.secondary_stress {
            SecondaryStress::Unstressed => "unstressed",
            SecondaryStress::Primary => "primary",
        };
        let _ = writeln!(out, "secondary_stress {secondary}");
        let _ = writeln!(
            out,
            "suppress_adjacent_stress {}",
            self.patterning.suppress_adjacent_stress
        );
        let _ = writeln!(out, "oov_fallback {}", self.patterning.oov_fallback);
        let _ = writeln!(out, "dimensionality {}", self.model.dimensionality());
        match &self.model {
            TrainedModel::Logistic(m) => {
                let _ = writeln!(out, "hyper learning_rate {}", real(m.config.learning_rate));
                let _ = writeln!(out, "hyper l2 {}", real(m.config.l2));
                let _ = writeln!(out, "hyper max_epochs {}", m.config.max_epochs);
                let _ = writeln!(out, "hyper tolerance {}", real(m.config.tolerance));
                let _ = writeln!(out, "bias {}", real(m.bias));
                let _ = writeln!(out, "weights {}", reals(m.weights.iter().copied()));
                let _ = writeln!(out, "means {}", reals(m.standardization.iter().map(|s| s.0)));
                let _ = writeln!(out, "stddevs {}", reals(m.standardization.iter().map(|s| s.1)));
                let _ = writeln!(out, "history {}", reals(m.loss_history.iter().copied()));
            }
            TrainedModel::Tree(m) => {
                write_tree_config(&mut out, "", &m.config);
                write_tree(&mut out, &m.tree);
            }
            TrainedModel::Forest(m) => {
                let _ = writeln!(out, "hyper n_trees {}", m.config.n_trees);
                write_tree_config(&mut out, "tree_", &m.config.tree);
                let fps = m
                    .config
                    .features_per_split
                    .map_or("auto".to_string(), |v| v.to_string());
                let _ = writeln!(out, "hyper features_per_split {fps}");
                let _ = writeln!(out, "hyper bootstrap {}", m.config.bootstrap);
                let _ = writeln!(out, "features_per_split {}", m.features_per_split);
                let seeds: Vec<String> = m.per_tree_seeds.iter().map(u64::to_string).collect();
                let _ = writeln!(out, "seeds {}", seeds.join(" "));
                let _ = writeln!(out, "trees {}", m.trees.len());
                for t in &m.trees {
                    write_tree(&mut out, t);
                }
            }
            TrainedModel::Gbdt(m) => {
                let c = &m.config;
                let _ = writeln!(out, "hyper rounds {}", c.rounds);
                let _ = writeln!(out, "hyper learning_rate {}", real(c.learning_rate));
                let _ = writeln!(out, "hyper max_depth {}", c.max_depth);
                let _ = writeln!(out, "hyper lambda_l2 {}", real(c.lambda_l2));
                let _ = writeln!(out, "hyper gamma {}", real(c.gamma));
                let _ = writeln!(out, "hyper min_child_weight {}", real(c.min_child_weight));
                let _ = writeln!(out, "base_score {}", real(m.base_score));
                let _ = writeln!(out, "history {}", reals(m.objective_history.iter().copied()));
                let _ = writeln!(out, "trees {}", m.trees.len());
                for t in &m.trees {
                    write_tree(&mut out, t);
                }
            }
        }
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut r = Reader::new(text);
        let header = r.line("header")?;
        match header.as_slice() {
            [magic, version] if *magic == MAGIC => {
                if *version != MODEL_FORMAT_VERSION.to_string() {
                    return Err(Error::format(format!("unsupported model format version {version}")));
                }
            }
            _ => return Err(Error::format("not a lyrimeter model file")),
        }
        let kind: ModelKind = r
            .single("kind")?
            .parse()
            .map_err(|_| Error::format("unknown model kind"))?;
        let seed = parse(r.single("seed")?)?;
        let features: FeatureSpec = r
            .single("features")?
            .parse()
            .map_err(|e: Error| Error::format(e.to_string()))?;
        let noise_removal = parse(r.single("noise_removal")?)?;
        let repeat_statistic = r
            .single("repeat_statistic")?
            .parse()
            .map_err(|e: Error| Error::format(e.to_string()))?;
        let secondary_stress = match r.single("secondary_stress")? {
            "unstressed" => SecondaryStress::Unstressed,
            "primary" => SecondaryStress::Primary,
            other => return Err(Error::format(format!("unknown secondary stress `{other}`"))),
        };
        let suppress_adjacent_stress = parse(r.single("suppress_adjacent_stress")?)?;
        let oov_fallback = parse(r.single("oov_fallback")?)?;
        let d: usize = parse(r.single("dimensionality")?)?;
        if d != features.dimensionality() {
            return Err(Error::format("model dimensionality disagrees with its feature spec"));
        }

        let model = match kind {
            ModelKind::Logistic => {
                let config = LogisticConfig {
                    learning_rate: parse(r.hyper("learning_rate")?)?,
                    l2: parse(r.hyper("l2")?)?,
                    max_epochs: parse(r.hyper("max_epochs")?)?,
                    tolerance: parse(r.hyper("tolerance")?)?,
                };
                let bias = parse(r.single("bias")?)?;
                let weights = r.reals("weights", Some(d))?;
                let means = r.reals("means", Some(d))?;
                let sds = r.reals("stddevs", Some(d))?;
                let loss_history = r.reals("history", None)?;
                TrainedModel::Logistic(LogisticModel {
                    weights,
                    bias,
                    standardization: means.into_iter().zip(sds).collect(),
                    config,
                    loss_history,
                })
            }
            ModelKind::Tree => {
                let config = r.tree_config("")?;
                let tree = r.tree(d)?;
                TrainedModel::Tree(DecisionTree { tree, config })
            }
            ModelKind::Forest => {
                let n_trees = parse(r.hyper("n_trees")?)?;
                let tree = r.tree_config("tree_")?;
                let features_per_split = match r.hyper("features_per_split")? {
                    "auto" => None,
                    v => Some(parse(v)?),
                };
                let bootstrap = parse(r.hyper("bootstrap")?)?;
                let config = ForestConfig {
                    n_trees,
                    tree,
                    features_per_split,
                    bootstrap,
                };
                let fps = parse(r.single("features_per_split")?)?;
                let seeds = r
                    .line("seeds")?
                    .iter()
                    .skip(1)
                    .map(|s| parse::<u64>(s))
                    .collect::<Result<Vec<_>>>()?;
                let n: usize = parse(r.single("trees")?)?;
                let trees = (0..n).map(|_| r.tree(d)).collect::<Result<Vec<_>>>()?;
                if seeds.len() != n {
                    return Err(Error::format("forest seed count differs from tree count"));
                }
                TrainedModel::Forest(ForestModel {
                    trees,
                    per_tree_seeds: seeds,
                    features_per_split: fps,
                    dimensionality: d,
                    config,
                })
            }
            ModelKind::Gbdt => {
                let config = GbdtConfig {
                    rounds: parse(r.hyper("rounds")?)?,
                    learning_rate: parse(r.hyper("learning_rate")?)?,
                    max_depth: parse(r.hyper("max_depth")?)?,
                    lambda_l2: parse(r.hyper("lambda_l2")?)?,
                    gamma: parse(r.hyper("gamma")?)?,
                    min_child_weight: parse(r.hyper("min_child_weight")?)?,
                };
                let base_score = parse(r.single("base_score")?)?;
                let objective_history = r.reals("history", None)?;
                let n: usize = parse(r.single("trees")?)?;
                let trees = (0..n).map(|_| r.tree(d)).collect::<Result<Vec<_>>>()?;
                TrainedModel::Gbdt(BoostedEnsemble {
                    trees,
                    base_score,
                    dimensionality: d,
                    config,
                    objective_history,
                })
            }
        };
        r.expect_word("end")?;
        Ok(ModelBundle {
            model,
            features,
            options: FeatureOptions {
                noise_removal,
                repeat_statistic,
            },
            patterning: PatterningConfig {
                secondary_stress,
                suppress_adjacent_stress,
                oov_fallback,
            },
            seed,
        })
    }
}

fn parse<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse::<T>().map_err(|_| Error::format(format!("cannot parse `{s}`")))
}

struct Reader<'a> {
    lines: std::iter::Peekable<std::str::Lines<'a>>,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader {
            lines: text.lines().peekable(),
        }
    }

    fn line(&mut self, what: &str) -> Result<Vec<&'a str>> {
        loop {
            let l = self
                .lines
                .next()
                .ok_or_else(|| Error::format(format!("model file truncated before `{what}`")))?;
            let words: Vec<&str> = l.split_whitespace().collect();
            if !words.is_empty() {
                return Ok(words);
            }
        }
    }

    fn keyed(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let words = self.line(key)?;
        if words[0] != key {
            return Err(Error::format(format!("expected `{key}`, found `{}`", words[0])));
        }
        Ok(words)
    }

    fn single(&mut self, key: &str) -> Result<&'a str> {
        let w = self.keyed(key)?;
        match w.as_slice() {
            [_, v] => Ok(v),
            _ => Err(Error::format(format!("`{key}` takes exactly one value"))),
        }
    }

    fn expect_word(&mut self, key: &str) -> Result<()> {
        let w = self.keyed(key)?;
        if w.len() != 1 {
            return Err(Error::format(format!("unexpected data after `{key}`")));
        }
        Ok(())
    }

    fn hyper(&mut self, name: &str) -> Result<&'a str> {
        let w = self.keyed("hyper")?;
        match w.as_slice() {
            [_, k, v] if *k == name => Ok(v),
            _ => Err(Error::format(format!("expected hyperparameter `{name}`"))),
        }
    }

    fn tree_config(&mut self, prefix: &str) -> Result<TreeConfig> {
        Ok(TreeConfig {
            max_depth: parse(self.hyper(&format!("{prefix}max_depth"))?)?,
            min_leaf: parse(self.hyper(&format!("{prefix}min_leaf"))?)?,
        })
    }

    fn reals(&mut self, key: &str, expected: Option<usize>) -> Result<Vec<f64>> {
        let w = self.keyed(key)?;
        let v = w[1..].iter().map(|s| parse::<f64>(s)).collect::<Result<Vec<_>>>()?;
        if let Some(n) = expected {
            if v.len() != n {
                return Err(Error::format(format!("`{key}` has {} values, expected {n}", v.len())));
            }
        }
        Ok(v)
    }

    fn tree(&mut self, d: usize) -> Result<Tree> {
        let n: usize = parse(self.single("tree")?)?;
        let mut nodes = Vec::with_capacity(n);
        for _ in 0..n {
            let w = self.line("tree node")?;
            nodes.push(match w.as_slice() {
                ["split", f, t, l, r] => TreeNode::Split {
                    feature: parse(f)?,
                    threshold: parse(t)?,
                    left: parse(l)?,
                    right: parse(r)?,
                },
                ["leaf", v] => TreeNode::Leaf { value: parse(v)? },
                _ => return Err(Error::format("malformed tree node")),
            });
        }
        let tree = Tree {
            nodes,
            dimensionality: d,
        };
        if !tree.validate() {
            return Err(Error::format("tree structure is invalid"));
        }
        Ok(tree)
    }
}

pub fn save_model(bundle: &ModelBundle, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, bundle.to_text()).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelBundle> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ModelBundle::from_text(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{train_forest, train_gbdt, train_logistic, train_tree};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn data() -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x: Vec<Vec<f64>> = (0..60)
            .map(|_| (0..3).map(|_| rng.gen::<f64>() * 4.0).collect())
            .collect();
        let y = x
            .iter()
            .map(|r| if r[0] + r[1] * 0.5 > 3.0 { 1.0 } else { 0.0 })
            .collect();
        (x, y)
    }

    fn bundle(model: TrainedModel) -> ModelBundle {
        ModelBundle {
            model,
            features: "overall:10:count,mean,mode".parse().unwrap(),
            options: FeatureOptions::default(),
            patterning: PatterningConfig::default(),
            seed: 17,
        }
    }

    fn all_models() -> Vec<TrainedModel> {
        let (x, y) = data();
        vec![
            TrainedModel::Logistic(train_logistic(&x, &y, &LogisticConfig::default()).unwrap()),
            TrainedModel::Tree(train_tree(&x, &y, &TreeConfig::default()).unwrap()),
            TrainedModel::Forest(
                train_forest(
                    &x,
                    &y,
                    &ForestConfig {
                        n_trees: 7,
                        ..Default::default()
                    },
                    3,
                )
                .unwrap(),
            ),
            TrainedModel::Gbdt(
                train_gbdt(
                    &x,
                    &y,
                    &GbdtConfig {
                        rounds: 15,
                        ..Default::default()
                    },
                )
                .unwrap(),
            ),
        ]
    }

    #[test]
    fn roundtrip_is_exact_for_every_kind() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in all_models() {
            let b = bundle(m);
            let text = b.to_text();
            let back = ModelBundle::from_text(&text).unwrap();
            assert_eq!(back, b);
            assert_eq!(back.model.kind(), b.model.kind());
            for _ in 0..100 {
                let x: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * 5.0 - 0.5).collect();
                assert_eq!(
                    back.model.predict_proba(&x).unwrap().to_bits(),
                    b.model.predict_proba(&x).unwrap().to_bits()
                );
            }
        }
    }

    #[test]
    fn truncated_and_foreign_files_fail() {
        let text = bundle(all_models().pop().unwrap()).to_text();
        let cut = &text[..text.len() / 2];
        assert!(matches!(ModelBundle::from_text(cut), Err(Error::Format(_))));
        assert!(matches!(
            ModelBundle::from_text(&text.replace("kind gbdt", "kind svm")),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            ModelBundle::from_text(&text.replace("lyrimeter-model 1", "lyrimeter-model 9")),
            Err(Error::Format(_))
        ));
        assert!(ModelBundle::from_text("").is_err());
    }

    #[test]
    fn gbdt_tag_dispatch() {
        let text = bundle(all_models().pop().unwrap()).to_text();
        assert!(text.contains("\nkind gbdt\n"));
        assert!(matches!(
            ModelBundle::from_text(&text).unwrap().model,
            TrainedModel::Gbdt(_)
        ));
    }

    #[test]
    fn reals_have_seventeen_significant_digits() {
        assert_eq!(real(0.1), "1.0000000000000001e-1");
        assert_eq!(real(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
