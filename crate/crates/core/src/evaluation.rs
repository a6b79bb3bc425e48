//! Classification metrics, ROC analysis, stratified cross-validation, the
//! feature ablation grid and correlation matrices.
//!
//! The positive class throughout is four-four.

use std::fmt;
use std::io;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureSpec, LabeledDataset, Statistic, StructuralType, TimeSignature};
use crate::models::{train, TrainConfig};
use crate::patterning::StressBeatPattern;
use crate::resampling::{resample, ResampleKind, ResampleReport, SmoteParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn from_predictions(truth: &[TimeSignature], predicted: &[TimeSignature]) -> Self {
        let mut cm = ConfusionMatrix::default();
        for (t, p) in truth.iter().zip(predicted) {
            match (t.is_positive(), p.is_positive()) {
                (true, true) => cm.tp += 1,
                (false, true) => cm.fp += 1,
                (true, false) => cm.fn_ += 1,
                (false, false) => cm.tn += 1,
            }
        }
        cm
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Precision and recall are 0 when their denominator is 0, F1 is 0 when
/// both are 0.
pub fn prf_metrics(cm: &ConfusionMatrix) -> Result<Prf> {
    if cm.total() == 0 {
        return Err(Error::argument("empty confusion matrix"));
    }
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let recall = ratio(cm.tp, cm.tp + cm.fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(Prf {
        accuracy: ratio(cm.tp + cm.tn, cm.total()),
        precision,
        recall,
        f1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    /// (false positive rate, true positive rate), from (0,0) to (1,1).
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

impl RocCurve {
    /// `fpr,tpr` lines under a header.
    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["fpr", "tpr"])?;
        for (f, t) in &self.points {
            wtr.write_record([f.to_string(), t.to_string()])?;
        }
        wtr.flush().map_err(|e| Error::format(e.to_string()))?;
        Ok(())
    }
}

/// Sweep the threshold over the distinct scores in descending order; tied
/// scores move together, producing a diagonal segment.
pub fn roc_auc(scores: &[f64], labels: &[TimeSignature]) -> Result<RocCurve> {
    if scores.len() != labels.len() {
        return Err(Error::argument("scores and labels differ in length"));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::argument("NaN score"));
    }
    let pos = labels.iter().filter(|l| l.is_positive()).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::argument("ROC needs both classes"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (tp0, fp0) = (tp, fp);
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]].is_positive() {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        // trapezoid in count units; normalized once at the end
        auc += (fp - fp0) as f64 * (tp + tp0) as f64 / 2.0;
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    Ok(RocCurve {
        points,
        auc: auc / (pos as f64 * neg as f64),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Each class is shuffled and dealt round-robin over the folds, continuing
/// from the fold where the previous class stopped so that fold sizes stay
/// within one of each other.
pub fn stratified_kfold(labels: &[TimeSignature], k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::argument("cross-validation needs at least 2 folds"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tests: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut next = 0;
    for class in TimeSignature::ALL {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < k {
            return Err(Error::argument(format!(
                "class {class} has {} samples, fewer than {k} folds",
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        for i in idx {
            tests[next].push(i);
            next = (next + 1) % k;
        }
    }
    Ok(tests
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let mut in_test = vec![false; labels.len()];
            for &i in &test {
                in_test[i] = true;
            }
            Fold {
                train: (0..labels.len()).filter(|&i| !in_test[i]).collect(),
                test,
            }
        })
        .collect())
}

/// Where resampling happens relative to the fold split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ResampleScope {
    /// Each training partition separately; test partitions stay untouched.
    #[default]
    Folds,
    /// The whole dataset before splitting.
    Whole,
}

impl FromStr for ResampleScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "folds" => Ok(ResampleScope::Folds),
            "whole" => Ok(ResampleScope::Whole),
            other => Err(Error::argument(format!("unknown resample scope `{other}`"))),
        }
    }
}

impl fmt::Display for ResampleScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResampleScope::Folds => "folds",
            ResampleScope::Whole => "whole",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CvConfig {
    pub folds: usize,
    pub seed: u64,
    pub resample: ResampleKind,
    /// `seed` inside is ignored; per-fold seeds are derived from `seed` above.
    pub smote: SmoteParams,
    pub scope: ResampleScope,
    pub model: TrainConfig,
    pub threshold: f64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 5,
            seed: 0,
            resample: ResampleKind::SmoteTomek,
            smote: SmoteParams::default(),
            scope: ResampleScope::Folds,
            model: TrainConfig::default(),
            threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub roc_auc: f64,
}

impl Metrics {
    fn mean(ms: &[Metrics]) -> Metrics {
        let n = ms.len() as f64;
        let avg = |f: fn(&Metrics) -> f64| ms.iter().map(f).sum::<f64>() / n;
        Metrics {
            accuracy: avg(|m| m.accuracy),
            precision: avg(|m| m.precision),
            recall: avg(|m| m.recall),
            f1: avg(|m| m.f1),
            roc_auc: avg(|m| m.roc_auc),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldReport {
    pub fold: usize,
    pub seed: u64,
    pub train_size: usize,
    pub test_size: usize,
    /// `None` under whole-dataset resampling.
    pub resampling: Option<ResampleReport>,
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
    #[serde(skip)]
    pub test_indices: Vec<usize>,
    #[serde(skip)]
    pub test_scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub positive_class: String,
    pub samples: usize,
    pub config: CvConfig,
    /// Set under whole-dataset resampling.
    pub resampling: Option<ResampleReport>,
    pub folds: Vec<FoldReport>,
    /// Unweighted mean over folds.
    pub mean: Metrics,
    pub confusion: ConfusionMatrix,
    /// ROC over the pooled out-of-fold scores.
    #[serde(skip)]
    pub roc: RocCurve,
    pub pooled_auc: f64,
}

/// Train on each training partition (resampled per `cfg.scope`) and score
/// the held-out partition.
pub fn cross_validate(dataset: &LabeledDataset, cfg: &CvConfig) -> Result<EvalReport> {
    let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
    let split_seed: u64 = master.gen();
    let whole_seed: u64 = master.gen();
    let fold_seeds: Vec<u64> = (0..cfg.folds).map(|_| master.gen()).collect();

    let (data, whole_report) = match cfg.scope {
        ResampleScope::Folds => (dataset.clone(), None),
        ResampleScope::Whole => {
            let out = resample(
                dataset,
                cfg.resample,
                &SmoteParams {
                    seed: whole_seed,
                    ..cfg.smote
                },
            )?;
            (out.dataset, Some(out.report))
        }
    };
    let folds = stratified_kfold(&data.labels, cfg.folds, split_seed)?;

    let reports: Vec<FoldReport> = folds
        .par_iter()
        .enumerate()
        .map(|(f, fold)| {
            let seed = fold_seeds[f];
            let mut train_set = data.subset(&fold.train);
            let mut resampling = None;
            if cfg.scope == ResampleScope::Folds {
                let out = resample(&train_set, cfg.resample, &SmoteParams { seed, ..cfg.smote })?;
                train_set = out.dataset;
                resampling = Some(out.report);
            }
            let model = train(&train_set, &TrainConfig { seed, ..cfg.model })?;
            let scores = fold
                .test
                .iter()
                .map(|&i| model.predict_proba(&data.rows[i]))
                .collect::<Result<Vec<f64>>>()?;
            let truth: Vec<TimeSignature> = fold.test.iter().map(|&i| data.labels[i]).collect();
            let predicted: Vec<TimeSignature> = scores
                .iter()
                .map(|&p| TimeSignature::from_positive(p >= cfg.threshold))
                .collect();
            let confusion = ConfusionMatrix::from_predictions(&truth, &predicted);
            let prf = prf_metrics(&confusion)?;
            let auc = roc_auc(&scores, &truth)?.auc;
            Ok(FoldReport {
                fold: f,
                seed,
                train_size: train_set.len(),
                test_size: fold.test.len(),
                resampling,
                confusion,
                metrics: Metrics {
                    accuracy: prf.accuracy,
                    precision: prf.precision,
                    recall: prf.recall,
                    f1: prf.f1,
                    roc_auc: auc,
                },
                test_indices: fold.test.clone(),
                test_scores: scores,
            })
        })
        .collect::<Result<_>>()?;

    let mut pooled_scores = vec![0.0; data.len()];
    let mut confusion = ConfusionMatrix::default();
    for r in &reports {
        for (&i, &s) in r.test_indices.iter().zip(&r.test_scores) {
            pooled_scores[i] = s;
        }
        confusion.tp += r.confusion.tp;
        confusion.fp += r.confusion.fp;
        confusion.fn_ += r.confusion.fn_;
        confusion.tn += r.confusion.tn;
    }
    let roc = roc_auc(&pooled_scores, &data.labels)?;
    let mean = Metrics::mean(&reports.iter().map(|r| r.metrics).collect::<Vec<_>>());
    Ok(EvalReport {
        positive_class: TimeSignature::FourFour.to_string(),
        samples: data.len(),
        config: *cfg,
        resampling: whole_report,
        folds: reports,
        mean,
        confusion,
        pooled_auc: roc.auc,
        roc,
    })
}

/// One feature combination of the ablation grid, as selection flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridRow {
    /// overall, repeat
    pub structural: [bool; 2],
    /// count, mean, mode
    pub statistics: [bool; 3],
    /// 10, 100, 1000
    pub patterns: [bool; 3],
}

const GRID_COLUMNS: [&str; 8] = ["overall", "repeat", "count", "mean", "mode", "10", "100", "1000"];
const METRIC_COLUMNS: [&str; 5] = ["accuracy", "precision", "recall", "f1", "roc_auc"];

fn pick<T: Copy>(flags: &[bool], all: &[T]) -> Vec<T> {
    flags.iter().zip(all).filter(|(f, _)| **f).map(|(_, v)| *v).collect()
}

impl GridRow {
    pub fn spec(&self) -> Result<FeatureSpec> {
        FeatureSpec::new(
            pick(&self.structural, &StructuralType::ALL),
            pick(&self.patterns, &StressBeatPattern::ALL),
            pick(&self.statistics, &Statistic::ALL),
        )
    }

    fn flags(&self) -> [bool; 8] {
        let [o, r] = self.structural;
        let [c, me, mo] = self.statistics;
        let [a, b, d] = self.patterns;
        [o, r, c, me, mo, a, b, d]
    }

    fn from_flags(f: [bool; 8]) -> Self {
        GridRow {
            structural: [f[0], f[1]],
            statistics: [f[2], f[3], f[4]],
            patterns: [f[5], f[6], f[7]],
        }
    }

    pub fn is_full(&self) -> bool {
        self.flags().iter().all(|f| *f)
    }

    pub fn single_pattern(&self) -> bool {
        self.patterns.iter().filter(|f| **f).count() == 1
    }
}

const DEFAULT_GRID: &str = include_str!("../data/ablation_grid.csv");

/// Reads a grid where `*` marks a selected subcategory.
pub fn read_grid<R: io::Read>(r: R) -> Result<Vec<GridRow>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != GRID_COLUMNS {
        return Err(Error::format(format!(
            "grid header must be `{}`",
            GRID_COLUMNS.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let mut f = [false; 8];
        for (c, slot) in f.iter_mut().enumerate() {
            *slot = match &rec[c] {
                "*" => true,
                "" => false,
                other => {
                    return Err(Error::Parse {
                        line: i + 2,
                        message: format!("grid cell `{other}` is neither `*` nor empty"),
                    })
                }
            };
        }
        let row = GridRow::from_flags(f);
        row.spec().map_err(|e| Error::Parse {
            line: i + 2,
            message: e.to_string(),
        })?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::format("ablation grid has no rows"));
    }
    Ok(rows)
}

pub fn default_grid() -> Vec<GridRow> {
    read_grid(DEFAULT_GRID.as_bytes()).expect("bundled grid is valid")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    #[serde(skip)]
    pub grid: GridRow,
    pub features: String,
    pub dimensionality: usize,
    pub metrics: Metrics,
}

/// Cross-validates each grid row on the matching columns of `full`, which
/// must contain every feature the grid can select.
pub fn run_ablation(full: &LabeledDataset, grid: &[GridRow], cfg: &CvConfig) -> Result<Vec<AblationRow>> {
    if grid.is_empty() {
        return Err(Error::argument("ablation grid is empty"));
    }
    grid.par_iter()
        .map(|row| {
            let spec = row.spec()?;
            let ds = full.select_features(&spec)?;
            let report = cross_validate(&ds, cfg)?;
            Ok(AblationRow {
                grid: *row,
                features: spec.to_string(),
                dimensionality: spec.dimensionality(),
                metrics: report.mean,
            })
        })
        .collect()
}

/// Flag columns then metric columns.
pub fn write_ablation_csv<W: io::Write>(rows: &[AblationRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(GRID_COLUMNS.iter().chain(&METRIC_COLUMNS))?;
    for r in rows {
        let m = &r.metrics;
        let mut rec: Vec<String> = r
            .grid
            .flags()
            .iter()
            .map(|f| if *f { "*" } else { "" }.to_string())
            .collect();
        rec.extend(
            [m.accuracy, m.precision, m.recall, m.f1, m.roc_auc]
                .iter()
                .map(|v| format!("{v:.4}")),
        );
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|e| Error::format(e.to_string()))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    pub matrix: Vec<Vec<f64>>,
    /// Zero-variance columns, whose off-diagonal entries are reported as 0.
    pub constant_columns: Vec<usize>,
}

pub fn pearson_correlation_matrix(rows: &[Vec<f64>]) -> Result<Correlation> {
    if rows.len() < 2 {
        return Err(Error::argument("correlation needs at least 2 rows"));
    }
    let d = rows[0].len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::argument("ragged matrix"));
    }
    let n = rows.len() as f64;
    let means: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let centered: Vec<Vec<f64>> = (0..d).map(|j| rows.iter().map(|r| r[j] - means[j]).collect()).collect();
    let norms: Vec<f64> = centered
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let constant_columns: Vec<usize> = (0..d).filter(|&j| norms[j] == 0.0).collect();
    let mut matrix = vec![vec![0.0; d]; d];
    for a in 0..d {
        matrix[a][a] = 1.0;
        for b in a + 1..d {
            let r = if norms[a] == 0.0 || norms[b] == 0.0 {
                0.0
            } else {
                let dot: f64 = centered[a].iter().zip(&centered[b]).map(|(x, y)| x * y).sum();
                (dot / (norms[a] * norms[b])).clamp(-1.0, 1.0)
            };
            matrix[a][b] = r;
            matrix[b][a] = r;
        }
    }
    Ok(Correlation {
        matrix,
        constant_columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use TimeSignature::{FourFour as P, ThreeFour as N};

    #[test]
    fn prf_examples() {
        let m = prf_metrics(&ConfusionMatrix {
            tp: 2,
            fp: 1,
            fn_: 1,
            tn: 6,
        })
        .unwrap();
        assert!((m.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.accuracy - 0.8).abs() < 1e-12);
        let perfect = prf_metrics(&ConfusionMatrix {
            tp: 3,
            fp: 0,
            fn_: 0,
            tn: 4,
        })
        .unwrap();
        assert_eq!(
            (perfect.accuracy, perfect.precision, perfect.recall, perfect.f1),
            (1.0, 1.0, 1.0, 1.0)
        );
        let none = prf_metrics(&ConfusionMatrix {
            tp: 0,
            fp: 0,
            fn_: 2,
            tn: 2,
        })
        .unwrap();
        assert_eq!((none.precision, none.f1), (0.0, 0.0));
        assert!(prf_metrics(&ConfusionMatrix::default()).is_err());
    }

    #[test]
    fn roc_examples() {
        let r = roc_auc(&[0.9, 0.8, 0.7, 0.6], &[P, N, P, N]).unwrap();
        assert!((r.auc - 0.75).abs() < 1e-12);
        assert_eq!(r.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(r.points.last(), Some(&(1.0, 1.0)));
        assert_eq!(roc_auc(&[0.9, 0.8, 0.2, 0.1], &[P, P, N, N]).unwrap().auc, 1.0);
        assert_eq!(roc_auc(&[0.5; 6], &[P, N, P, N, N, P]).unwrap().auc, 0.5);
        assert!(roc_auc(&[0.1, 0.2], &[P, P]).is_err());
    }

    #[test]
    fn kfold_exact_stratification() {
        let labels: Vec<TimeSignature> = (0..10).map(|i| if i < 5 { N } else { P }).collect();
        let folds = stratified_kfold(&labels, 5, 4).unwrap();
        assert_eq!(folds.len(), 5);
        let mut all: Vec<usize> = Vec::new();
        for f in &folds {
            assert_eq!(f.test.len(), 2);
            assert_eq!(f.test.iter().filter(|&&i| labels[i] == P).count(), 1);
            assert_eq!(f.train.len() + f.test.len(), 10);
            all.extend(&f.test);
        }
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        assert_eq!(folds, stratified_kfold(&labels, 5, 4).unwrap());
        assert!(stratified_kfold(&labels[..8], 5, 0).is_err());
    }

    #[test]
    fn correlation_basics() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, -(i as f64), 3.0]).collect();
        let c = pearson_correlation_matrix(&rows).unwrap();
        assert!((c.matrix[0][0] - 1.0).abs() < 1e-15);
        assert!((c.matrix[0][1] + 1.0).abs() < 1e-12);
        assert_eq!(c.matrix[0][2], 0.0);
        assert_eq!(c.matrix[2][2], 1.0);
        assert_eq!(c.constant_columns, vec![2]);
        assert!(pearson_correlation_matrix(&rows[..1]).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let g = default_grid();
        assert_eq!(g.len(), 24);
        assert_eq!(g.iter().filter(|r| r.is_full()).count(), 1);
        let one = GridRow {
            structural: [true, false],
            statistics: [true, true, true],
            patterns: [true, false, false],
        };
        assert_eq!(one.spec().unwrap().dimensionality(), 3);
    }

    #[test]
    fn grid_rejects_bad_cells() {
        let bad = "overall,repeat,count,mean,mode,10,100,1000\n*,,x,,,*,,\n";
        assert!(matches!(read_grid(bad.as_bytes()), Err(Error::Parse { line: 2, .. })));
        let empty_cat = "overall,repeat,count,mean,mode,10,100,1000\n,,*,,,*,,\n";
        assert!(read_grid(empty_cat.as_bytes()).is_err());
    }

    #[test]
    fn ablation_csv_layout() {
        let row = AblationRow {
            grid: default_grid()[0],
            features: String::new(),
            dimensionality: 0,
            metrics: Metrics {
                accuracy: 0.5,
                precision: 0.25,
                recall: 1.0,
                f1: 0.4,
                roc_auc: 0.75,
            },
        };
        let mut buf = Vec::new();
        write_ablation_csv(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "overall,repeat,count,mean,mode,10,100,1000,accuracy,precision,recall,f1,roc_auc"
        );
        assert!(lines.next().unwrap().ends_with("0.5000,0.2500,1.0000,0.4000,0.7500"));
    }
}
