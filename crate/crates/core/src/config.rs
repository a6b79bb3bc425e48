//! Pipeline settings from a flat `key = value` file, command-line flags
//! and built-in defaults, in increasing order of precedence.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::evaluation::{CvConfig, ResampleScope};
use crate::features::{FeatureOptions, FeatureSpec, RepeatStatistic};
use crate::lexicon::{load_lexicon, PronunciationLexicon, RemnantList, StopwordPolicy};
use crate::models::{ForestConfig, GbdtConfig, LogisticConfig, ModelKind, TrainConfig, TreeConfig};
use crate::patterning::{PatterningConfig, SecondaryStress};
use crate::resampling::{ResampleKind, SmoteParams};

/// `on`/`off` switch that also accepts TOML booleans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum Switch {
    Bool(bool),
    Word(SwitchWord),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwitchWord {
    On,
    Off,
}

impl Switch {
    pub fn enabled(self) -> bool {
        matches!(self, Switch::Bool(true) | Switch::Word(SwitchWord::On))
    }
}

impl std::str::FromStr for Switch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "on" | "true" => Ok(Switch::Bool(true)),
            "off" | "false" => Ok(Switch::Bool(false)),
            other => Err(Error::argument(format!("expected on or off, got `{other}`"))),
        }
    }
}

macro_rules! raw_config {
    ($($(#[$doc:meta])* $field:ident : $ty:ty),* $(,)?) => {
        /// Every setting is optional; unset ones fall through to the next
        /// source.
        #[derive(Debug, Clone, Default, PartialEq, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct RawConfig {
            $($(#[$doc])* pub $field: Option<$ty>,)*
        }

        impl RawConfig {
            /// Settings of `top` win over those of `self`.
            pub fn overlay(self, top: RawConfig) -> RawConfig {
                RawConfig { $($field: top.$field.or(self.$field),)* }
            }
        }
    };
}

raw_config! {
    lexicon: PathBuf,
    stopwords: PathBuf,
    retained_pronouns: PathBuf,
    remnants: PathBuf,
    seed: u64,
    features: String,
    model: String,
    resample: String,
    resample_scope: String,
    folds: usize,
    threads: usize,
    noise_removal: Switch,
    repeat_statistic: String,
    /// `unstressed` or `primary`
    secondary_stress: String,
    suppress_adjacent_stress: Switch,
    oov_fallback: Switch,
    smote_k: usize,
    smote_ratio: f64,
    threshold: f64,
    logistic_learning_rate: f64,
    logistic_l2: f64,
    logistic_max_epochs: usize,
    logistic_tolerance: f64,
    tree_max_depth: usize,
    tree_min_leaf: usize,
    forest_trees: usize,
    forest_max_depth: usize,
    forest_min_leaf: usize,
    forest_features_per_split: usize,
    forest_bootstrap: Switch,
    gbdt_rounds: usize,
    gbdt_learning_rate: f64,
    gbdt_max_depth: usize,
    gbdt_lambda: f64,
    gbdt_gamma: f64,
    gbdt_min_child_weight: f64,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<RawConfig> {
        toml::from_str(text).map_err(|e| Error::format(format!("config: {}", e.message())))
    }

    /// Relative paths inside the file are taken relative to its directory.
    pub fn read(path: &Path) -> Result<RawConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut raw = RawConfig::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut raw.lexicon,
            &mut raw.stopwords,
            &mut raw.retained_pronouns,
            &mut raw.remnants,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(raw)
    }

    /// One `key=value` assignment; the value is read as a TOML literal and,
    /// failing that, as a bare string.
    pub fn assignment(kv: &str) -> Result<RawConfig> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::argument(format!("`{kv}` is not key=value")))?;
        let (k, v) = (k.trim(), v.trim());
        RawConfig::parse(&format!("{k} = {v}")).or_else(|_| {
            let quoted = toml::Value::String(v.to_string()).to_string();
            RawConfig::parse(&format!("{k} = {quoted}"))
        })
    }
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub lexicon: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub retained_pronouns: Option<PathBuf>,
    pub remnants: Option<PathBuf>,
    pub seed: Option<u64>,
    pub features: FeatureSpec,
    pub options: FeatureOptions,
    pub patterning: PatterningConfig,
    pub resample: ResampleKind,
    pub smote: SmoteParams,
    pub scope: ResampleScope,
    pub folds: usize,
    pub threads: Option<usize>,
    pub threshold: f64,
    pub train: TrainConfig,
    /// Whether the feature spec was set explicitly rather than defaulted.
    pub features_given: bool,
    pub noise_removal_given: bool,
}

impl PipelineConfig {
    pub fn resolve(raw: &RawConfig) -> Result<PipelineConfig> {
        let tree_d = TreeConfig::default();
        let forest_d = ForestConfig::default();
        let gbdt_d = GbdtConfig::default();
        let logistic_d = LogisticConfig::default();
        let model: ModelKind = raw.model.as_deref().map(str::parse).transpose()?.unwrap_or_default();
        let train = TrainConfig {
            kind: model,
            logistic: LogisticConfig {
                learning_rate: raw.logistic_learning_rate.unwrap_or(logistic_d.learning_rate),
                l2: raw.logistic_l2.unwrap_or(logistic_d.l2),
                max_epochs: raw.logistic_max_epochs.unwrap_or(logistic_d.max_epochs),
                tolerance: raw.logistic_tolerance.unwrap_or(logistic_d.tolerance),
            },
            tree: TreeConfig {
                max_depth: raw.tree_max_depth.unwrap_or(tree_d.max_depth),
                min_leaf: raw.tree_min_leaf.unwrap_or(tree_d.min_leaf),
            },
            forest: ForestConfig {
                n_trees: raw.forest_trees.unwrap_or(forest_d.n_trees),
                tree: TreeConfig {
                    max_depth: raw.forest_max_depth.unwrap_or(forest_d.tree.max_depth),
                    min_leaf: raw.forest_min_leaf.unwrap_or(forest_d.tree.min_leaf),
                },
                features_per_split: raw.forest_features_per_split.or(forest_d.features_per_split),
                bootstrap: raw.forest_bootstrap.map_or(forest_d.bootstrap, Switch::enabled),
            },
            gbdt: GbdtConfig {
                rounds: raw.gbdt_rounds.unwrap_or(gbdt_d.rounds),
                learning_rate: raw.gbdt_learning_rate.unwrap_or(gbdt_d.learning_rate),
                max_depth: raw.gbdt_max_depth.unwrap_or(gbdt_d.max_depth),
                lambda_l2: raw.gbdt_lambda.unwrap_or(gbdt_d.lambda_l2),
                gamma: raw.gbdt_gamma.unwrap_or(gbdt_d.gamma),
                min_child_weight: raw.gbdt_min_child_weight.unwrap_or(gbdt_d.min_child_weight),
            },
            seed: raw.seed.unwrap_or(0),
        };
        let secondary_stress = match raw.secondary_stress.as_deref() {
            None | Some("unstressed") => SecondaryStress::Unstressed,
            Some("primary") => SecondaryStress::Primary,
            Some(other) => return Err(Error::argument(format!("unknown secondary stress `{other}`"))),
        };
        let threshold = raw.threshold.unwrap_or(0.5);
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::argument("threshold must lie in [0, 1]"));
        }
        let folds = raw.folds.unwrap_or(5);
        if folds < 2 {
            return Err(Error::argument("folds must be at least 2"));
        }
        if raw.threads == Some(0) {
            return Err(Error::argument("threads must be at least 1"));
        }
        Ok(PipelineConfig {
            lexicon: raw.lexicon.clone(),
            stopwords: raw.stopwords.clone(),
            retained_pronouns: raw.retained_pronouns.clone(),
            remnants: raw.remnants.clone(),
            seed: raw.seed,
            features: raw
                .features
                .as_deref()
                .map(str::parse)
                .transpose()?
                .unwrap_or_else(FeatureSpec::full),
            options: FeatureOptions {
                noise_removal: raw.noise_removal.is_none_or(Switch::enabled),
                repeat_statistic: raw
                    .repeat_statistic
                    .as_deref()
                    .map(str::parse::<RepeatStatistic>)
                    .transpose()?
                    .unwrap_or_default(),
            },
            patterning: PatterningConfig {
                secondary_stress,
                suppress_adjacent_stress: raw.suppress_adjacent_stress.is_none_or(Switch::enabled),
                oov_fallback: raw.oov_fallback.is_none_or(Switch::enabled),
            },
            resample: raw.resample.as_deref().map(str::parse).transpose()?.unwrap_or_default(),
            smote: SmoteParams {
                k: raw.smote_k.unwrap_or(5),
                ratio: raw.smote_ratio.unwrap_or(1.0),
                seed: raw.seed.unwrap_or(0),
            },
            scope: raw
                .resample_scope
                .as_deref()
                .map(str::parse)
                .transpose()?
                .unwrap_or_default(),
            folds,
            threads: raw.threads,
            threshold,
            train,
            features_given: raw.features.is_some(),
            noise_removal_given: raw.noise_removal.is_some(),
        })
    }

    /// Seed for a stochastic stage; there is deliberately no default.
    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::argument("this command needs a seed (--seed or `seed` in the config file)"))
    }

    pub fn cv(&self) -> Result<CvConfig> {
        Ok(CvConfig {
            folds: self.folds,
            seed: self.require_seed()?,
            resample: self.resample,
            smote: self.smote,
            scope: self.scope,
            model: self.train,
            threshold: self.threshold,
        })
    }
}

/// Lexicon and word lists named by a configuration.
pub struct Resources {
    lexicon: Option<PronunciationLexicon>,
    pub stopwords: StopwordPolicy,
    pub remnants: RemnantList,
}

impl Resources {
    pub fn load(cfg: &PipelineConfig) -> Result<Resources> {
        Ok(Resources {
            lexicon: cfg.lexicon.as_ref().map(load_lexicon).transpose()?,
            stopwords: StopwordPolicy::from_files(cfg.stopwords.as_deref(), cfg.retained_pronouns.as_deref())?,
            remnants: cfg
                .remnants
                .as_deref()
                .map(RemnantList::from_file)
                .transpose()?
                .unwrap_or_default(),
        })
    }

    pub fn lexicon(&self) -> &PronunciationLexicon {
        self.lexicon.as_ref().unwrap_or_else(|| PronunciationLexicon::bundled())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = PipelineConfig::resolve(&RawConfig::default()).unwrap();
        assert_eq!(c.features, FeatureSpec::full());
        assert_eq!(c.train.kind, ModelKind::Gbdt);
        assert_eq!(c.resample, ResampleKind::SmoteTomek);
        assert_eq!(c.folds, 5);
        assert!(c.options.noise_removal);
        assert!(c.require_seed().is_err());
    }

    #[test]
    fn precedence_cli_over_file_over_default() {
        let file = RawConfig::parse("seed = 3\nmodel = \"forest\"\nfolds = 4\nnoise_removal = \"off\"\n").unwrap();
        let cli = RawConfig {
            seed: Some(9),
            ..Default::default()
        };
        let c = PipelineConfig::resolve(&file.overlay(cli)).unwrap();
        assert_eq!(c.seed, Some(9));
        assert_eq!(c.train.kind, ModelKind::Forest);
        assert_eq!(c.folds, 4);
        assert!(!c.options.noise_removal);
        assert_eq!(c.train.gbdt, GbdtConfig::default());
    }

    #[test]
    fn assignments() {
        assert_eq!(RawConfig::assignment("gbdt_rounds=50").unwrap().gbdt_rounds, Some(50));
        assert_eq!(
            RawConfig::assignment("model = tree").unwrap().model.as_deref(),
            Some("tree")
        );
        assert_eq!(
            RawConfig::assignment("noise_removal=on")
                .unwrap()
                .noise_removal
                .map(Switch::enabled),
            Some(true)
        );
        assert!(RawConfig::assignment("bogus=1").is_err());
        assert!(RawConfig::assignment("seed").is_err());
    }

    #[test]
    fn unknown_keys_and_bad_values_fail() {
        assert!(matches!(RawConfig::parse("colour = 1"), Err(Error::Format(_))));
        let raw = RawConfig::parse("model = \"svm\"").unwrap();
        assert!(PipelineConfig::resolve(&raw).is_err());
    }

    #[test]
    fn relative_paths_follow_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "lexicon = \"dict.txt\"\nstopwords = \"/abs/stop.txt\"\n").unwrap();
        let raw = RawConfig::read(&path).unwrap();
        assert_eq!(raw.lexicon.unwrap(), dir.path().join("dict.txt"));
        assert_eq!(raw.stopwords.unwrap(), PathBuf::from("/abs/stop.txt"));
    }
}
