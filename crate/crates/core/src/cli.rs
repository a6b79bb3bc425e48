//! The `lyrimeter` command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{PipelineConfig, RawConfig, Resources, Switch};
use crate::corpus::{class_counts, labeled_lyrics, write_corpus, Corpus, CorpusRecord, IMBALANCE_SHARE};
use crate::error::{Error, Result};
use crate::evaluation::{
    cross_validate, default_grid, pearson_correlation_matrix, read_grid, run_ablation, write_ablation_csv,
};
use crate::features::{FeatureSpec, Featurizer, LabeledDataset, Statistic, TimeSignature};
use crate::models::{load_model, save_model, train, ModelBundle, ModelKind};
use crate::patterning::{LyricsText, Patterner};
use crate::resampling::{resample, ResampleKind, ResampleReport};
use crate::synthetic::{generate_corpus, SyntheticConfig};

#[derive(Debug, Parser)]
#[command(
    name = "lyrimeter",
    version,
    about = "Classify the time signature of songs from their lyrics"
)]
pub struct Cli {
    #[command(flatten)]
    pub shared: SharedArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Pipeline settings; each overrides the same key of the config file.
#[derive(Debug, Args, Default)]
pub struct SharedArgs {
    /// Flat `key = value` settings file
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Pronunciation dictionary in CMU format (default: bundled)
    #[arg(long, global = true, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,
    /// Replacement stopword list, one word per line
    #[arg(long, global = true, value_name = "FILE")]
    pub stopwords: Option<PathBuf>,
    /// Replacement list of pronouns kept as keywords
    #[arg(long, global = true, value_name = "FILE")]
    pub retained_pronouns: Option<PathBuf>,
    /// Replacement list of contraction remnants
    #[arg(long, global = true, value_name = "FILE")]
    pub remnants: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// "<structural>:<patterns>:<statistics>", e.g. "overall,repeat:10,100:count,mean"
    #[arg(long, global = true, value_name = "SPEC")]
    pub features: Option<String>,
    /// logistic | tree | forest | gbdt
    #[arg(long, global = true, value_name = "KIND")]
    pub model: Option<String>,
    /// none | smote | tomek | smotetomek
    #[arg(long, global = true, value_name = "KIND")]
    pub resample: Option<String>,
    #[arg(long, global = true, value_name = "N")]
    pub folds: Option<usize>,
    /// on | off
    #[arg(long, global = true, value_name = "SWITCH")]
    pub noise_removal: Option<Switch>,
    /// folds | whole
    #[arg(long, global = true, value_name = "SCOPE")]
    pub resample_scope: Option<String>,
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Any config key, e.g. --set gbdt_rounds=100
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub assignments: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a corpus and report class counts
    Ingest { corpus: PathBuf },
    /// Write the feature matrix of a corpus
    Featurize {
        corpus: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Resample a feature matrix, train a model and save it
    Train {
        #[arg(value_name = "FEATURES_CSV")]
        matrix: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        /// Training summary (default: <out>.summary.json)
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Cross-validate on a corpus or feature matrix
    Evaluate {
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Cross-validate every row of a feature-selection grid
    Ablate {
        input: PathBuf,
        /// Grid of `*` flags (default: bundled 24-row grid)
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Predict the time signature of one song
    Predict { model_file: PathBuf, lyrics: PathBuf },
    /// Per-class feature histograms and the feature correlation matrix
    Stats {
        corpus: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Generate a synthetic benchmark corpus
    Synth {
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        songs: usize,
        /// Share of three-four songs
        #[arg(long, default_value_t = 0.1)]
        minority: f64,
        /// Share of verse lines written in the other meter
        #[arg(long, default_value_t = 0.25)]
        noise: f64,
    },
}

impl SharedArgs {
    fn raw(&self) -> Result<RawConfig> {
        let file = match &self.config {
            Some(p) => RawConfig::read(p)?,
            None => RawConfig::default(),
        };
        let flags = RawConfig {
            lexicon: self.lexicon.clone(),
            stopwords: self.stopwords.clone(),
            retained_pronouns: self.retained_pronouns.clone(),
            remnants: self.remnants.clone(),
            seed: self.seed,
            features: self.features.clone(),
            model: self.model.clone(),
            resample: self.resample.clone(),
            resample_scope: self.resample_scope.clone(),
            folds: self.folds,
            threads: self.threads,
            noise_removal: self.noise_removal,
            ..Default::default()
        };
        let mut cli = RawConfig::default();
        for kv in &self.assignments {
            cli = cli.overlay(RawConfig::assignment(kv)?);
        }
        Ok(file.overlay(cli.overlay(flags)))
    }
}

fn create(path: &Path) -> Result<fs::File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    create(path)?.write_all(bytes).map_err(|e| Error::io(path, e))
}

fn say(out: &mut dyn Write, line: impl AsRef<str>) -> Result<()> {
    writeln!(out, "{}", line.as_ref()).map_err(|e| Error::io("<stdout>", e))
}

fn featurize_records(
    cfg: &PipelineConfig,
    res: &Resources,
    spec: &FeatureSpec,
    records: &[CorpusRecord],
    err: &mut dyn Write,
) -> Result<LabeledDataset> {
    let patterner = Patterner::new(res.lexicon(), &res.stopwords, &res.remnants, cfg.patterning);
    let featurizer = Featurizer::new(patterner, spec.clone(), cfg.options);
    let outcome = featurizer.build_matrix(&labeled_lyrics(records))?;
    for s in &outcome.skipped {
        say(err, format!("skipped {}: {}", s.id, s.reason))?;
    }
    if outcome.oov_words > 0 {
        say(
            err,
            format!(
                "note: {} word occurrences missing from the lexicon were scored by the vowel-group heuristic",
                outcome.oov_words
            ),
        )?;
    }
    Ok(outcome.dataset)
}

fn is_corpus(path: &Path) -> Result<bool> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.trim_start().starts_with('{'))
}

/// A feature matrix either read from CSV or computed from a corpus. With
/// `needed` set, the result has exactly those columns.
fn load_dataset(
    cfg: &PipelineConfig,
    input: &Path,
    needed: Option<&FeatureSpec>,
    err: &mut dyn Write,
) -> Result<LabeledDataset> {
    if is_corpus(input)? {
        let res = Resources::load(cfg)?;
        let records = Corpus::read_strict(input)?;
        return featurize_records(cfg, &res, needed.unwrap_or(&cfg.features), &records, err);
    }
    let file = fs::File::open(input).map_err(|e| Error::io(input, e))?;
    let ds = LabeledDataset::read_csv(file)?;
    match needed {
        Some(spec) => ds.select_features(spec),
        None => {
            FeatureSpec::from_feature_names(&ds.feature_names)?;
            Ok(ds)
        }
    }
}

fn class_line(counts: &std::collections::BTreeMap<TimeSignature, usize>) -> String {
    format!(
        "3/4: {}, 4/4: {}",
        counts[&TimeSignature::ThreeFour],
        counts[&TimeSignature::FourFour]
    )
}

fn stochastic_training(cfg: &PipelineConfig) -> bool {
    matches!(cfg.resample, ResampleKind::Smote | ResampleKind::SmoteTomek) || cfg.train.kind == ModelKind::Forest
}

#[derive(Serialize)]
struct TrainSummary<'a> {
    seed: u64,
    model: ModelKind,
    features: String,
    rows: usize,
    resampling: &'a ResampleReport,
    training_accuracy: f64,
    training_loss: Option<f64>,
}

fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".summary.json");
    out.with_file_name(name)
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = PipelineConfig::resolve(&cli.shared.raw()?)?;
    // buffered so the command can run inside a dedicated thread pool
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let result = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::argument(e.to_string()))?
            .install(|| execute(&cli.command, &cfg, &mut o, &mut e)),
        None => execute(&cli.command, &cfg, &mut o, &mut e),
    };
    out.write_all(&o).map_err(|e| Error::io("<stdout>", e))?;
    err.write_all(&e).map_err(|e| Error::io("<stderr>", e))?;
    result
}

fn execute(command: &Command, cfg: &PipelineConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Ingest { corpus } => {
            let c = Corpus::read(corpus)?;
            let counts = c.class_counts();
            say(out, format!("{} records ({})", c.records.len(), class_line(&counts)))?;
            if !c.records.is_empty() {
                let (minority, m) = counts.iter().min_by_key(|(_, n)| **n).map(|(k, n)| (*k, *n)).unwrap();
                let share = m as f64 / c.records.len() as f64;
                let ratio = if m == 0 {
                    "inf".to_string()
                } else {
                    format!("{:.2}", (c.records.len() - m) as f64 / m as f64)
                };
                say(
                    out,
                    format!(
                        "minority class {minority}: {:.2}% of records, imbalance ratio {ratio}:1",
                        100.0 * share
                    ),
                )?;
                if share < IMBALANCE_SHARE {
                    say(out, "imbalanced: resampling (e.g. --resample smotetomek) is advised")?;
                }
            }
            for r in &c.rejections {
                say(err, format!("line {}: {}", r.line, r.reason))?;
            }
            if c.rejections.is_empty() {
                Ok(0)
            } else {
                say(out, format!("{} rejected lines", c.rejections.len()))?;
                Ok(Error::format("").exit_code())
            }
        }
        Command::Featurize { corpus, out: path } => {
            let res = Resources::load(cfg)?;
            let records = Corpus::read_strict(corpus)?;
            let ds = featurize_records(cfg, &res, &cfg.features, &records, err)?;
            let mut buf = Vec::new();
            ds.write_csv(&mut buf)?;
            write_file(path, &buf)?;
            say(
                out,
                format!(
                    "wrote {} rows x {} features to {} ({} skipped)",
                    ds.len(),
                    ds.dimensionality(),
                    path.display(),
                    records.len() - ds.len()
                ),
            )?;
            Ok(0)
        }
        Command::Train {
            matrix,
            out: path,
            summary,
        } => {
            let seed = if stochastic_training(cfg) {
                cfg.require_seed()?
            } else {
                cfg.seed.unwrap_or(0)
            };
            let needed = cfg.features_given.then_some(&cfg.features);
            let ds = load_dataset(cfg, matrix, needed, err)?;
            let spec = FeatureSpec::from_feature_names(&ds.feature_names)?;
            let smote = crate::resampling::SmoteParams { seed, ..cfg.smote };
            let resampled = resample(&ds, cfg.resample, &smote)?;
            let model = train(&resampled.dataset, &crate::models::TrainConfig { seed, ..cfg.train })?;
            let correct = ds
                .rows
                .iter()
                .zip(&ds.labels)
                .map(|(x, l)| Ok((model.predict(x, cfg.threshold)? == *l) as usize))
                .sum::<Result<usize>>()?;
            let bundle = ModelBundle {
                model,
                features: spec.clone(),
                options: cfg.options,
                patterning: cfg.patterning,
                seed,
            };
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            save_model(&bundle, path)?;
            let r = &resampled.report;
            let s = TrainSummary {
                seed,
                model: bundle.model.kind(),
                features: spec.to_string(),
                rows: resampled.dataset.len(),
                resampling: r,
                training_accuracy: correct as f64 / ds.len() as f64,
                training_loss: bundle.model.training_loss(),
            };
            let spath = summary.clone().unwrap_or_else(|| summary_path(path));
            write_file(&spath, (serde_json::to_string_pretty(&s)? + "\n").as_bytes())?;
            say(
                out,
                format!(
                    "trained {} on {} rows, {} features (seed {seed})",
                    s.model,
                    s.rows,
                    spec.dimensionality()
                ),
            )?;
            say(
                out,
                format!(
                    "class counts 3/4: {} -> {}, 4/4: {} -> {}",
                    r.before_three_four, r.after_three_four, r.before_four_four, r.after_four_four
                ),
            )?;
            say(out, format!("training accuracy {:.4}", s.training_accuracy))?;
            if let Some(l) = s.training_loss {
                say(out, format!("training loss {l:.6}"))?;
            }
            Ok(0)
        }
        Command::Evaluate { input, out_dir } => {
            let cv = cfg.cv()?;
            let needed = cfg.features_given.then_some(&cfg.features);
            let ds = load_dataset(cfg, input, needed, err)?;
            let report = cross_validate(&ds, &cv)?;
            write_file(
                &out_dir.join("report.json"),
                (serde_json::to_string_pretty(&report)? + "\n").as_bytes(),
            )?;
            let mut roc = Vec::new();
            report.roc.write_csv(&mut roc)?;
            write_file(&out_dir.join("roc.csv"), &roc)?;
            say(
                out,
                format!(
                    "{} on {} rows, {} folds, resample {} ({}), seed {}",
                    cv.model.kind, report.samples, cv.folds, cv.resample, cv.scope, cv.seed
                ),
            )?;
            let m = report.mean;
            say(
                out,
                format!(
                    "accuracy {:.4} precision {:.4} recall {:.4} f1 {:.4} auc {:.4}",
                    m.accuracy, m.precision, m.recall, m.f1, m.roc_auc
                ),
            )?;
            Ok(0)
        }
        Command::Ablate { input, grid, out: path } => {
            let cv = cfg.cv()?;
            let rows = match grid {
                Some(g) => read_grid(fs::File::open(g).map_err(|e| Error::io(g, e))?)?,
                None => default_grid(),
            };
            let ds = load_dataset(cfg, input, Some(&FeatureSpec::full()), err)?;
            let results = run_ablation(&ds, &rows, &cv)?;
            let mut buf = Vec::new();
            write_ablation_csv(&results, &mut buf)?;
            write_file(path, &buf)?;
            say(
                out,
                format!(
                    "wrote {} rows to {} ({}, seed {})",
                    results.len(),
                    path.display(),
                    cv.model.kind,
                    cv.seed
                ),
            )?;
            Ok(0)
        }
        Command::Predict { model_file, lyrics } => {
            let bundle = load_model(model_file)?;
            if cfg.features_given && cfg.features != bundle.features {
                return Err(Error::format(format!(
                    "model was trained on features {} but {} was requested",
                    bundle.features, cfg.features
                )));
            }
            if cfg.noise_removal_given && cfg.options.noise_removal != bundle.options.noise_removal {
                return Err(Error::format(
                    "noise removal setting differs from the one the model was trained with",
                ));
            }
            let res = Resources::load(cfg)?;
            let text = fs::read_to_string(lyrics).map_err(|e| Error::io(lyrics, e))?;
            let id = lyrics
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let patterner = Patterner::new(res.lexicon(), &res.stopwords, &res.remnants, bundle.patterning);
            let featurizer = Featurizer::new(patterner, bundle.features.clone(), bundle.options);
            let fv = featurizer.featurize(&LyricsText::new(id, text))?;
            let p = bundle.model.predict_proba(&fv.values)?;
            let label = TimeSignature::from_positive(p >= cfg.threshold);
            say(out, format!("{label}\tp={p:.6}"))?;
            Ok(0)
        }
        Command::Stats { corpus, out_dir } => {
            let res = Resources::load(cfg)?;
            let records = Corpus::read_strict(corpus)?;
            let ds = featurize_records(cfg, &res, &cfg.features, &records, err)?;
            write_file(&out_dir.join("stats.csv"), &stats_csv(&ds, &cfg.features)?)?;
            let corr = pearson_correlation_matrix(&ds.rows)?;
            for &c in &corr.constant_columns {
                say(
                    err,
                    format!(
                        "warning: feature {} is constant; its correlations are 0",
                        ds.feature_names[c]
                    ),
                )?;
            }
            let mut wtr = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["feature".to_string()];
            header.extend(ds.feature_names.iter().cloned());
            wtr.write_record(&header)?;
            for (name, row) in ds.feature_names.iter().zip(&corr.matrix) {
                let mut rec = vec![name.clone()];
                rec.extend(row.iter().map(|v| v.to_string()));
                wtr.write_record(&rec)?;
            }
            let bytes = wtr.into_inner().map_err(|e| Error::format(e.to_string()))?;
            write_file(&out_dir.join("correlation.csv"), &bytes)?;
            say(
                out,
                format!(
                    "{} songs ({}), {} features; wrote stats.csv and correlation.csv to {}",
                    ds.len(),
                    class_line(&class_counts(&records)),
                    ds.dimensionality(),
                    out_dir.display()
                ),
            )?;
            Ok(0)
        }
        Command::Synth {
            out: path,
            songs,
            minority,
            noise,
        } => {
            if !(0.0..=1.0).contains(minority) || !(0.0..=1.0).contains(noise) {
                return Err(Error::argument("--minority and --noise must lie in [0, 1]"));
            }
            let records = generate_corpus(&SyntheticConfig {
                songs: *songs,
                minority_fraction: *minority,
                line_noise: *noise,
                seed: cfg.require_seed()?,
            });
            let mut buf = Vec::new();
            write_corpus(&records, &mut buf)?;
            write_file(path, &buf)?;
            say(
                out,
                format!(
                    "wrote {} songs ({}) to {}",
                    records.len(),
                    class_line(&class_counts(&records)),
                    path.display()
                ),
            )?;
            Ok(0)
        }
    }
}

/// Histogram rows per feature and class, then class-conditional means.
fn stats_csv(ds: &LabeledDataset, spec: &FeatureSpec) -> Result<Vec<u8>> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["section", "feature", "class", "bin", "value"])?;
    let stats: Vec<Statistic> = spec.cells().map(|(_, _, t)| t).collect();
    for (j, name) in ds.feature_names.iter().enumerate() {
        // means are fractional: bin them by halves
        let bin_width = if stats[j] == Statistic::Mean { 0.5 } else { 1.0 };
        for class in TimeSignature::ALL {
            let mut bins = std::collections::BTreeMap::<i64, usize>::new();
            for (row, _) in ds.rows.iter().zip(&ds.labels).filter(|(_, l)| **l == class) {
                *bins.entry((row[j] / bin_width).floor() as i64).or_default() += 1;
            }
            for (b, n) in bins {
                let edge = b as f64 * bin_width;
                wtr.write_record(["histogram", name, class.as_str(), &edge.to_string(), &n.to_string()])?;
            }
        }
    }
    for (j, name) in ds.feature_names.iter().enumerate() {
        for class in TimeSignature::ALL {
            let vals: Vec<f64> = ds
                .rows
                .iter()
                .zip(&ds.labels)
                .filter(|(_, l)| **l == class)
                .map(|(r, _)| r[j])
                .collect();
            if vals.is_empty() {
                continue;
            }
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            wtr.write_record(["class_mean", name, class.as_str(), "", &mean.to_string()])?;
        }
    }
    wtr.into_inner().map_err(|e| Error::format(e.to_string()))
}

/// Process entry point: parses arguments, runs, and maps errors to exit
/// codes (2 for usage errors).
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let (mut out, mut err) = (stdout.lock(), stderr.lock());
    match run(&cli, &mut out, &mut err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
