//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any failed.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lyrimeter::corpus::labeled_lyrics;
use lyrimeter::evaluation::{cross_validate, default_grid, roc_auc, run_ablation, CvConfig};
use lyrimeter::features::{
    FeatureOptions, FeatureSpec, Featurizer, LabeledDataset, Statistic, StructuralType, TimeSignature,
};
use lyrimeter::lexicon::{PronunciationLexicon, RemnantList, StopwordPolicy};
use lyrimeter::models::{
    best_gini_split, gini, gradient_hessian, logistic_loss_and_gradient, logistic_raw_loss, train_forest, train_tree,
    ForestConfig, ModelKind, TrainConfig, TreeConfig,
};
use lyrimeter::patterning::{LyricsText, Patterner, PatterningConfig, StressBeatPattern};
use lyrimeter::resampling::{knn, smote, smote_tomek, tomek_links, SmoteParams};
use lyrimeter::synthetic::{generate_corpus, SyntheticConfig};

use TimeSignature::{FourFour, ThreeFour};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    check(
        elapsed < Duration::from_secs(limit_secs),
        format!("took {:.1}s, limit {limit_secs}s", elapsed.as_secs_f64()),
    )
}

fn dataset(rows: Vec<Vec<f64>>, labels: Vec<TimeSignature>) -> LabeledDataset {
    let d = rows.first().map_or(0, |r| r.len());
    let mut ds = LabeledDataset::new((0..d).map(|j| format!("x{j}")).collect());
    for (i, (r, l)) in rows.into_iter().zip(labels).enumerate() {
        ds.push(r, l, format!("r{i}"));
    }
    ds
}

const SAMPLE_LYRICS: &str = "I can see the birds flying\n\
My eyeballs are going up and down\n\
My head's turning around\n\
My hands are clapping\n\
My feet are jumping\n\
I want to fly like a bird\n\
Like a bird";

fn sample_phrase_rows() -> Outcome {
    let start = Instant::now();
    let lex = PronunciationLexicon::bundled();
    let pol = StopwordPolicy::default();
    let rem = RemnantList::default();
    let expected_rows: [(usize, &[u8]); 5] = [
        (2, &[0, 1, 0, 0, 1, 0, 1, 0, 1]),
        (3, &[0, 1, 1, 0, 0, 1]),
        (4, &[0, 1, 0, 1, 0]),
        (5, &[0, 1, 0, 1, 0]),
        (7, &[0, 0, 1]),
    ];
    let raw = Patterner::new(
        lex,
        &pol,
        &rem,
        PatterningConfig {
            suppress_adjacent_stress: false,
            ..Default::default()
        },
    );
    let optimized = Patterner::new(lex, &pol, &rem, PatterningConfig::default());
    let lyrics = LyricsText::new("sample", SAMPLE_LYRICS);
    let raw_set = raw.pattern(&lyrics).map_err(|e| e.to_string())?;
    let opt_set = optimized.pattern(&lyrics).map_err(|e| e.to_string())?;
    check(
        raw_set.vectors.len() == 7,
        format!("{} phrases, expected 7", raw_set.vectors.len()),
    )?;
    for (row, expected) in expected_rows {
        let got = raw_set.vectors[row - 1].digits();
        check(
            got == expected,
            format!("row {row}: got {got:?}, expected {expected:?}"),
        )?;
        // rows without adjacent stresses survive optimization unchanged
        if !expected.windows(2).any(|w| w == [1, 1]) {
            let got = opt_set.vectors[row - 1].digits();
            check(got == expected, format!("optimized row {row}: got {got:?}"))?;
        }
    }
    check(
        opt_set.vectors[2].digits() == [0, 1, 0, 0, 0, 1],
        "row 3 after optimization",
    )?;
    within(start.elapsed(), 1)?;
    Ok("phrases 2, 3, 4, 5, 7 match".into())
}

fn feature_grid() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let pick = |rng: &mut ChaCha8Rng, n: usize| -> Vec<usize> {
            let k = rng.gen_range(1..=n);
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(rng);
            all.truncate(k);
            all
        };
        let s = pick(&mut rng, 2);
        let p = pick(&mut rng, 3);
        let t = pick(&mut rng, 3);
        let spec = FeatureSpec::new(
            s.iter().map(|&i| StructuralType::ALL[i]),
            p.iter().map(|&i| StressBeatPattern::ALL[i]),
            t.iter().map(|&i| Statistic::ALL[i]),
        )
        .map_err(|e| e.to_string())?;
        let expected = s.len() * p.len() * t.len();
        check(
            spec.dimensionality() == expected,
            format!("{spec}: {} != {expected}", spec.dimensionality()),
        )?;
        check(spec.feature_names().len() == expected, format!("{spec}: name count"))?;
    }
    let cited = FeatureSpec::new(
        StructuralType::ALL,
        [StressBeatPattern::Duple, StressBeatPattern::Triple],
        Statistic::ALL,
    )
    .map_err(|e| e.to_string())?;
    check(
        cited.dimensionality() == 12,
        format!("cited case gave {}", cited.dimensionality()),
    )?;
    Ok("50 random specs exact, cited case 12".into())
}

fn gaussian_pair(rng: &mut ChaCha8Rng, minority: usize, majority: usize, dims: usize, gap: f64) -> LabeledDataset {
    let normal = |rng: &mut ChaCha8Rng| {
        // Box-Muller
        let u: f64 = 1.0 - rng.gen::<f64>();
        let v: f64 = rng.gen();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    };
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..minority + majority {
        let (c, shift) = if i < minority {
            (ThreeFour, gap)
        } else {
            (FourFour, 0.0)
        };
        rows.push((0..dims).map(|_| normal(rng) + shift).collect());
        labels.push(c);
    }
    dataset(rows, labels)
}

fn smote_geometry() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ds = gaussian_pair(&mut rng, 100, 10_100, 4, 1.5);
    let params = SmoteParams {
        k: 5,
        ratio: 1.0,
        seed: 11,
    };
    let out = smote(&ds, &params).map_err(|e| e.to_string())?;
    check(
        out.samples.len() == 10_000,
        format!("{} synthetic samples", out.samples.len()),
    )?;
    let minority: Vec<usize> = (0..ds.len()).filter(|&i| ds.labels[i] == ThreeFour).collect();
    let mut worst: f64 = 0.0;
    for s in &out.samples {
        check((0.0..=1.0).contains(&s.lambda), format!("lambda {}", s.lambda))?;
        check(
            ds.labels[s.parent] == ThreeFour && ds.labels[s.neighbor] == ThreeFour,
            "parent/neighbor class",
        )?;
        let nn = knn(&ds.rows, s.parent, 5, Some(&minority)).map_err(|e| e.to_string())?;
        check(nn.contains(&s.neighbor), "neighbor outside the parent's k nearest")?;
        let (xi, xn) = (&ds.rows[s.parent], &ds.rows[s.neighbor]);
        for j in 0..xi.len() {
            worst = worst.max((s.values[j] - (xi[j] + s.lambda * (xn[j] - xi[j]))).abs());
        }
    }
    check(worst <= 1e-12, format!("max deviation {worst:e}"))?;
    for trial in 0..20 {
        let a = rng.gen_range(3..40);
        let b = rng.gen_range(a + 1..200);
        let ds = gaussian_pair(&mut rng, a, b, 3, 1.0);
        let out = smote(&ds, &SmoteParams { seed: trial, ..params }).map_err(|e| e.to_string())?;
        check(
            out.dataset.class_count(ThreeFour) == out.dataset.class_count(FourFour),
            format!("ratio 1.0 left {a}+synthetic vs {b}"),
        )?;
    }
    within(start.elapsed(), 5)?;
    Ok(format!("10000 samples, max deviation {worst:.1e}; ratio 1.0 balances"))
}

fn brute_tomek(ds: &LabeledDataset) -> BTreeSet<(usize, usize)> {
    let n = ds.len();
    let d2 = |a: usize, b: usize| -> f64 { ds.rows[a].iter().zip(&ds.rows[b]).map(|(x, y)| (x - y).powi(2)).sum() };
    let nearest: Vec<usize> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .min_by(|&a, &b| d2(i, a).total_cmp(&d2(i, b)).then(a.cmp(&b)))
                .unwrap()
        })
        .collect();
    let mut links = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            if nearest[i] == j && nearest[j] == i && ds.labels[i] != ds.labels[j] {
                links.insert((i, j));
            }
        }
    }
    links
}

fn tomek_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut total = 0;
    for trial in 0..200 {
        let n = rng.gen_range(4..=200);
        let dims = rng.gen_range(2..=8);
        // every third dataset sits on a coarse grid so duplicate distances occur
        let coarse = trial % 3 == 0;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..dims)
                    .map(|_| {
                        if coarse {
                            rng.gen_range(0..4) as f64
                        } else {
                            rng.gen::<f64>()
                        }
                    })
                    .collect()
            })
            .collect();
        let mut labels: Vec<TimeSignature> = (0..n)
            .map(|_| if rng.gen_bool(0.3) { ThreeFour } else { FourFour })
            .collect();
        labels[0] = ThreeFour;
        labels[1] = FourFour;
        let ds = dataset(rows, labels);
        let (links, cleaned) = tomek_links(&ds).map_err(|e| e.to_string())?;
        let got: BTreeSet<(usize, usize)> = links
            .iter()
            .map(|l| {
                (
                    l.minority_index.min(l.majority_index),
                    l.minority_index.max(l.majority_index),
                )
            })
            .collect();
        let expected = brute_tomek(&ds);
        check(
            got == expected,
            format!("trial {trial}: links {got:?} vs oracle {expected:?}"),
        )?;
        let minority = ds.minority_class();
        check(
            links.iter().all(|l| ds.labels[l.minority_index] == minority),
            format!("trial {trial}: roles"),
        )?;
        check(
            cleaned.len() == ds.len() - links.len(),
            format!("trial {trial}: removal count"),
        )?;
        total += links.len();
    }
    Ok(format!("200 datasets, {total} links, all equal to brute force"))
}

fn imbalanced_counts() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // separation of 2 per axis in 4 dimensions: the clouds touch, so Tomek
    // cleaning has links to remove
    let ds = gaussian_pair(&mut rng, 179, 4249, 4, 2.0);
    let out = smote_tomek(
        &ds,
        &SmoteParams {
            k: 5,
            ratio: 1.0,
            seed: 5,
        },
    )
    .map_err(|e| e.to_string())?;
    let a = out.dataset.class_count(ThreeFour);
    let b = out.dataset.class_count(FourFour);
    let total = a + b;
    let diff = a.abs_diff(b);
    check(
        diff as f64 <= 0.005 * total as f64,
        format!("3/4 {a}, 4/4 {b}: difference {diff} of {total}"),
    )?;
    within(start.elapsed(), 30)?;
    Ok(format!(
        "179/4249 -> {a}/{b}, {} Tomek removals, difference {diff}",
        out.report.tomek_removals
    ))
}

fn concordance(scores: &[f64], labels: &[TimeSignature]) -> f64 {
    let mut num = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if labels[i] != FourFour {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] == FourFour {
                continue;
            }
            pairs += 1.0;
            num += if si > sj {
                1.0
            } else if si == sj {
                0.5
            } else {
                0.0
            };
        }
    }
    num / pairs
}

fn auc_dual() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for trial in 0..500 {
        let n = rng.gen_range(2..120);
        let levels = if trial % 2 == 0 { rng.gen_range(2..8) } else { 1_000_000 };
        let scores: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(0..levels) as f64 / levels as f64)
            .collect();
        let mut labels: Vec<TimeSignature> = (0..n)
            .map(|_| if rng.gen_bool(0.5) { FourFour } else { ThreeFour })
            .collect();
        labels[0] = FourFour;
        labels[1] = ThreeFour;
        let auc = roc_auc(&scores, &labels).map_err(|e| e.to_string())?.auc;
        worst = worst.max((auc - concordance(&scores, &labels)).abs());
    }
    check(worst <= 1e-9, format!("max difference {worst:e}"))?;
    Ok(format!("500 sets, max difference {worst:.1e}"))
}

fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn gradient_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d = 4;
    let x: Vec<Vec<f64>> = (0..60)
        .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let y: Vec<f64> = (0..60).map(|_| rng.gen_bool(0.4) as u8 as f64).collect();
    let l2 = 0.1;
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let w: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let b: f64 = rng.gen_range(-1.0..1.0);
        let (_, gw, gb) = logistic_loss_and_gradient(&w, b, &x, &y, l2);
        for j in 0..d {
            let mut up = w.clone();
            let mut down = w.clone();
            up[j] += h;
            down[j] -= h;
            let num = (logistic_loss_and_gradient(&up, b, &x, &y, l2).0
                - logistic_loss_and_gradient(&down, b, &x, &y, l2).0)
                / (2.0 * h);
            worst = worst.max(rel_err(gw[j], num));
        }
        let num = (logistic_loss_and_gradient(&w, b + h, &x, &y, l2).0
            - logistic_loss_and_gradient(&w, b - h, &x, &y, l2).0)
            / (2.0 * h);
        worst = worst.max(rel_err(gb, num));
    }
    let logistic_worst = worst;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let f: f64 = rng.gen_range(-6.0..6.0);
        let t = rng.gen_bool(0.5) as u8 as f64;
        let (g, hess) = gradient_hessian(f, t);
        let e = 1e-5;
        let num_g = (logistic_raw_loss(f + e, t) - logistic_raw_loss(f - e, t)) / (2.0 * e);
        let num_h = (gradient_hessian(f + e, t).0 - gradient_hessian(f - e, t).0) / (2.0 * e);
        let e2 = 1e-3;
        let num_h2 =
            (logistic_raw_loss(f + e2, t) - 2.0 * logistic_raw_loss(f, t) + logistic_raw_loss(f - e2, t)) / (e2 * e2);
        worst = worst
            .max(rel_err(g, num_g))
            .max(rel_err(hess, num_h))
            .max(rel_err(hess, num_h2));
    }
    check(
        logistic_worst <= 1e-5,
        format!("logistic relative error {logistic_worst:e}"),
    )?;
    check(worst <= 1e-5, format!("boosting g/h relative error {worst:e}"))?;
    Ok(format!(
        "max relative error logistic {logistic_worst:.1e}, boosting {worst:.1e}"
    ))
}

/// Every feature, every midpoint between distinct values; first strictly
/// better candidate wins.
#[allow(clippy::needless_range_loop)]
fn exhaustive_split(x: &[Vec<f64>], y: &[f64], idx: &[usize], min_leaf: usize) -> Option<(usize, f64, f64)> {
    let n = idx.len() as f64;
    let pos: f64 = idx.iter().map(|&i| y[i]).sum();
    let parent = gini(pos, n);
    let mut best: Option<(usize, f64, f64)> = None;
    for f in 0..x[0].len() {
        let mut values: Vec<f64> = idx.iter().map(|&i| x[i][f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let t = w[0] + (w[1] - w[0]) / 2.0;
            let left: Vec<usize> = idx.iter().copied().filter(|&i| x[i][f] <= t).collect();
            let nl = left.len();
            let nr = idx.len() - nl;
            if nl < min_leaf || nr < min_leaf {
                continue;
            }
            let lp: f64 = left.iter().map(|&i| y[i]).sum();
            let gain = parent - nl as f64 / n * gini(lp, nl as f64) - nr as f64 / n * gini(pos - lp, nr as f64);
            if best.is_none_or(|b| gain > b.2 + 1e-12) {
                best = Some((f, t, gain));
            }
        }
    }
    best
}

fn model_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..100 {
        let n = rng.gen_range(2..=50);
        let d = rng.gen_range(1..=4);
        let levels = rng.gen_range(2..10);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(0..levels) as f64 * 0.5).collect())
            .collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_bool(0.5) as u8 as f64).collect();
        let min_leaf = rng.gen_range(1..4);
        let idx: Vec<usize> = (0..n).collect();
        let features: Vec<usize> = (0..d).collect();
        let got = best_gini_split(&x, &y, &idx, &features, min_leaf).map(|s| (s.feature, s.threshold, s.gain));
        let expected = exhaustive_split(&x, &y, &idx, min_leaf);
        let same = match (got, expected) {
            (None, None) => true,
            (Some(a), Some(b)) => a.0 == b.0 && a.1 == b.1 && (a.2 - b.2).abs() <= 1e-12,
            _ => false,
        };
        check(same, format!("trial {trial}: split {got:?} vs oracle {expected:?}"))?;

        if y.contains(&1.0) && y.contains(&0.0) {
            let tree_cfg = TreeConfig { max_depth: 4, min_leaf };
            let tree = train_tree(&x, &y, &tree_cfg).map_err(|e| e.to_string())?;
            let forest_cfg = ForestConfig {
                n_trees: 1,
                tree: tree_cfg,
                features_per_split: Some(d),
                bootstrap: false,
            };
            let forest = train_forest(&x, &y, &forest_cfg, trial).map_err(|e| e.to_string())?;
            check(
                forest.trees[0] == tree.tree,
                format!("trial {trial}: forest tree differs"),
            )?;
            for _ in 0..50 {
                let q: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..levels as f64)).collect();
                check(
                    forest.probability(&q) == tree.tree.evaluate(&q),
                    format!("trial {trial}: prediction"),
                )?;
            }
        }
    }
    Ok("100 exhaustive-split trials equal; 1-tree forest equals CART".into())
}

fn benchmark_dataset(spec: FeatureSpec) -> LabeledDataset {
    let records = generate_corpus(&SyntheticConfig::default());
    let lex = PronunciationLexicon::bundled();
    let pol = StopwordPolicy::default();
    let rem = RemnantList::default();
    let patterner = Patterner::new(lex, &pol, &rem, PatterningConfig::default());
    Featurizer::new(patterner, spec, FeatureOptions::default())
        .build_matrix(&labeled_lyrics(&records))
        .expect("benchmark corpus featurizes")
        .dataset
}

fn cv(kind: ModelKind) -> CvConfig {
    CvConfig {
        seed: 1,
        model: TrainConfig::of_kind(kind),
        ..Default::default()
    }
}

fn benchmark() -> Outcome {
    let start = Instant::now();
    let ds = benchmark_dataset(FeatureSpec::full());
    check(ds.len() == 1000, format!("{} of 1000 songs featurized", ds.len()))?;
    check(ds.class_count(ThreeFour) == 100, "minority share")?;
    let mut summary = Vec::new();
    let mut f1 = Vec::new();
    for kind in [ModelKind::Logistic, ModelKind::Forest, ModelKind::Gbdt] {
        let m = cross_validate(&ds, &cv(kind)).map_err(|e| e.to_string())?.mean;
        summary.push(format!("{kind} f1 {:.4} auc {:.4}", m.f1, m.roc_auc));
        if kind != ModelKind::Logistic {
            check(m.f1 >= 0.95, format!("{kind} f1 {:.4}", m.f1))?;
            check(m.roc_auc >= 0.97, format!("{kind} auc {:.4}", m.roc_auc))?;
        }
        f1.push(m.f1);
    }
    check(
        f1[1] > f1[0] && f1[2] > f1[0],
        format!("ordering: {}", summary.join(", ")),
    )?;
    within(start.elapsed(), 120)?;
    Ok(summary.join(", "))
}

fn ablation_shape() -> Outcome {
    let grid = default_grid();
    check(grid.len() == 24, format!("{} grid rows", grid.len()))?;
    let ds = benchmark_dataset(FeatureSpec::full());
    let rows = run_ablation(&ds, &grid, &cv(ModelKind::Gbdt)).map_err(|e| e.to_string())?;
    let mut csv = Vec::new();
    lyrimeter::evaluation::write_ablation_csv(&rows, &mut csv).map_err(|e| e.to_string())?;
    let text = String::from_utf8(csv).unwrap();
    let header = text.lines().next().unwrap_or_default();
    check(
        header == "overall,repeat,count,mean,mode,10,100,1000,accuracy,precision,recall,f1,roc_auc",
        format!("header {header}"),
    )?;
    check(text.lines().count() == 25, "24 data rows")?;
    let full: Vec<_> = rows.iter().filter(|r| r.grid.is_full()).collect();
    check(full.len() == 1, format!("{} all-subcategory rows", full.len()))?;
    let best = full[0].metrics.roc_auc;
    let singles: Vec<f64> = rows
        .iter()
        .filter(|r| r.grid.single_pattern())
        .map(|r| r.metrics.roc_auc)
        .collect();
    let violations = singles.iter().filter(|&&a| a > best).count();
    check(
        violations <= 1,
        format!("{violations} single-pattern rows beat auc {best:.4}"),
    )?;
    let top = singles.iter().cloned().fold(0.0, f64::max);
    Ok(format!(
        "24 rows; full auc {best:.4} vs best single-pattern {top:.4}, {violations} violations"
    ))
}

fn run_cli(args: &[&str], dir: &Path) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_lyrimeter"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

/// Runs the seeded commands in `dir` and returns every output, file or
/// stdout, in a fixed order.
fn cli_outputs(dir: &Path, threads: &str) -> Result<Vec<(String, Vec<u8>)>, String> {
    let t = ["--threads", threads, "--seed", "3"];
    let with = |rest: &[&str]| -> Vec<String> { rest.iter().chain(&t).map(|s| s.to_string()).collect() };
    let mut outputs = Vec::new();
    let mut step = |args: Vec<String>, files: &[&str]| -> Result<(), String> {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        outputs.push((args.join(" "), run_cli(&refs, dir)?));
        for f in files {
            let bytes = std::fs::read(dir.join(f)).map_err(|e| format!("{f}: {e}"))?;
            outputs.push((f.to_string(), bytes));
        }
        Ok(())
    };
    step(
        with(&["synth", "--songs", "300", "-o", "corpus.jsonl"]),
        &["corpus.jsonl"],
    )?;
    step(
        with(&["featurize", "corpus.jsonl", "-o", "features.csv"]),
        &["features.csv"],
    )?;
    step(
        with(&["train", "features.csv", "-o", "model.txt", "--model", "forest"]),
        &["model.txt", "model.txt.summary.json"],
    )?;
    step(
        with(&["evaluate", "features.csv", "--out-dir", "eval"]),
        &["eval/report.json", "eval/roc.csv"],
    )?;
    std::fs::write(
        dir.join("grid.csv"),
        "overall,repeat,count,mean,mode,10,100,1000\n*,,*,*,*,*,*,*\n,*,*,,,*,,\n",
    )
    .map_err(|e| e.to_string())?;
    step(
        with(&["ablate", "features.csv", "--grid", "grid.csv", "-o", "ablation.csv"]),
        &["ablation.csv"],
    )?;
    std::fs::write(
        dir.join("song.txt"),
        "happy morning singing river\nlovely summer dancing",
    )
    .map_err(|e| e.to_string())?;
    step(with(&["predict", "model.txt", "song.txt"]), &[])?;
    step(
        with(&["stats", "corpus.jsonl", "--out-dir", "stats"]),
        &["stats/stats.csv", "stats/correlation.csv"],
    )?;
    Ok(outputs)
}

fn determinism() -> Outcome {
    // library level: resampling and cross-validation
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ds = gaussian_pair(&mut rng, 40, 400, 3, 1.0);
    let params = SmoteParams {
        k: 5,
        ratio: 1.0,
        seed: 4,
    };
    let a = smote_tomek(&ds, &params).map_err(|e| e.to_string())?;
    let b = smote_tomek(&ds, &params).map_err(|e| e.to_string())?;
    check(a.dataset == b.dataset, "smote_tomek differs between runs")?;
    let cfg = cv(ModelKind::Forest);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let r4 = pool.install(|| cross_validate(&ds, &cfg)).map_err(|e| e.to_string())?;
    let r1 = serial
        .install(|| cross_validate(&ds, &cfg))
        .map_err(|e| e.to_string())?;
    check(r1 == r4, "cross-validation depends on thread count")?;

    // command level
    let mut runs = Vec::new();
    for threads in ["1", "4", "1"] {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        runs.push(cli_outputs(dir.path(), threads)?);
    }
    let mut compared = 0;
    for other in &runs[1..] {
        for ((name, x), (_, y)) in runs[0].iter().zip(other) {
            check(x == y, format!("{name} differs"))?;
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} outputs identical across runs and thread counts 1/4"
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("sample phrase rows", sample_phrase_rows),
        ("feature grid arithmetic", feature_grid),
        ("SMOTE geometry", smote_geometry),
        ("Tomek oracle equivalence", tomek_oracle),
        ("class counts at scale", imbalanced_counts),
        ("AUC dual computation", auc_dual),
        ("gradient checks", gradient_checks),
        ("small-instance model oracles", model_oracles),
        ("synthetic end-to-end benchmark", benchmark),
        ("ablation shape", ablation_shape),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
