//! Class rebalancing: SMOTE oversampling, Tomek-link undersampling and
//! their combination.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{LabeledDataset, TimeSignature};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoteParams {
    pub k: usize,
    /// Target minority/majority proportion, in (0, 1].
    pub ratio: f64,
    pub seed: u64,
}

impl Default for SmoteParams {
    fn default() -> Self {
        SmoteParams {
            k: 5,
            ratio: 1.0,
            seed: 0,
        }
    }
}

impl SmoteParams {
    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::argument("SMOTE k must be at least 1"));
        }
        if !(self.ratio > 0.0 && self.ratio <= 1.0) {
            return Err(Error::argument(format!("SMOTE ratio {} outside (0, 1]", self.ratio)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSample {
    pub values: Vec<f64>,
    pub parent: usize,
    pub neighbor: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TomekLink {
    pub minority_index: usize,
    pub majority_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ResampleKind {
    None,
    Smote,
    Tomek,
    #[default]
    SmoteTomek,
}

impl FromStr for ResampleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ResampleKind::None),
            "smote" => Ok(ResampleKind::Smote),
            "tomek" => Ok(ResampleKind::Tomek),
            "smotetomek" => Ok(ResampleKind::SmoteTomek),
            other => Err(Error::argument(format!("unknown resampling `{other}`"))),
        }
    }
}

impl fmt::Display for ResampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResampleKind::None => "none",
            ResampleKind::Smote => "smote",
            ResampleKind::Tomek => "tomek",
            ResampleKind::SmoteTomek => "smotetomek",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResampleReport {
    pub kind: String,
    pub before_three_four: usize,
    pub before_four_four: usize,
    pub after_three_four: usize,
    pub after_four_four: usize,
    pub synthetic_samples: usize,
    pub tomek_removals: usize,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `k` nearest rows to `query` by Euclidean distance, ascending, ties by
/// lower index. `within` restricts the candidates; the query itself is
/// never returned.
pub fn knn(rows: &[Vec<f64>], query: usize, k: usize, within: Option<&[usize]>) -> Result<Vec<usize>> {
    let q = rows
        .get(query)
        .ok_or_else(|| Error::argument(format!("query row {query} out of range")))?;
    let mut cand: Vec<(f64, usize)> = match within {
        Some(idx) => idx
            .iter()
            .copied()
            .filter(|&i| i != query)
            .map(|i| (squared_distance(q, &rows[i]), i))
            .collect(),
        None => (0..rows.len())
            .filter(|&i| i != query)
            .map(|i| (squared_distance(q, &rows[i]), i))
            .collect(),
    };
    if k > cand.len() {
        return Err(Error::argument(format!(
            "k = {k} needs more than {} candidate rows",
            cand.len()
        )));
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(cand.into_iter().take(k).map(|(_, i)| i).collect())
}

/// Nearest neighbor of every row (ties by lower index).
fn nearest_neighbors(rows: &[Vec<f64>]) -> Vec<usize> {
    (0..rows.len())
        .into_par_iter()
        .map(|i| {
            let mut best = usize::MAX;
            let mut best_d = f64::INFINITY;
            for (j, r) in rows.iter().enumerate() {
                if j == i {
                    continue;
                }
                let d = squared_distance(&rows[i], r);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            best
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SmoteOutcome {
    /// Original rows first, synthetic rows appended.
    pub dataset: LabeledDataset,
    pub samples: Vec<SyntheticSample>,
}

/// Oversample the minority class up to `ceil(ratio × majority)` rows.
///
/// Parents cycle through minority rows in index order; the neighbor (one
/// of the parent's `k` nearest minority rows) and λ come from a ChaCha
/// stream seeded with `params.seed`.
pub fn smote(dataset: &LabeledDataset, params: &SmoteParams) -> Result<SmoteOutcome> {
    params.validate()?;
    let minority = dataset.minority_class();
    let minority_idx: Vec<usize> = (0..dataset.len()).filter(|&i| dataset.labels[i] == minority).collect();
    let majority_count = dataset.len() - minority_idx.len();
    if minority_idx.len() < 2 {
        return Err(Error::degenerate(format!(
            "SMOTE needs at least 2 minority rows, found {}",
            minority_idx.len()
        )));
    }
    let target = (params.ratio * majority_count as f64).ceil() as usize;
    let mut out = SmoteOutcome {
        dataset: dataset.clone(),
        samples: Vec::new(),
    };
    if minority_idx.len() >= target {
        return Ok(out);
    }
    let k = params.k.min(minority_idx.len() - 1);
    let neighbors: Vec<Vec<usize>> = minority_idx
        .par_iter()
        .map(|&i| knn(&dataset.rows, i, k, Some(&minority_idx)))
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let needed = target - minority_idx.len();
    for j in 0..needed {
        let slot = j % minority_idx.len();
        let parent = minority_idx[slot];
        let neighbor = neighbors[slot][rng.gen_range(0..k)];
        let lambda: f64 = rng.gen();
        let xi = &dataset.rows[parent];
        let xn = &dataset.rows[neighbor];
        let values: Vec<f64> = xi.iter().zip(xn).map(|(a, b)| a + lambda * (b - a)).collect();
        out.dataset.push(values.clone(), minority, format!("synthetic-{j}"));
        out.samples.push(SyntheticSample {
            values,
            parent,
            neighbor,
            lambda,
        });
    }
    Ok(out)
}

/// All mutual-nearest-neighbor pairs with opposite labels, and the dataset
/// with the majority member of each pair removed.
pub fn tomek_links(dataset: &LabeledDataset) -> Result<(Vec<TomekLink>, LabeledDataset)> {
    tomek_links_for(dataset, dataset.minority_class())
}

/// As [`tomek_links`], with the protected class given explicitly (after
/// SMOTE the classes may be tied).
pub fn tomek_links_for(dataset: &LabeledDataset, minority: TimeSignature) -> Result<(Vec<TomekLink>, LabeledDataset)> {
    if TimeSignature::ALL.iter().any(|c| dataset.class_count(*c) == 0) {
        return Err(Error::argument("Tomek links need both classes present"));
    }
    let nn = nearest_neighbors(&dataset.rows);
    let mut links = Vec::new();
    for (i, &j) in nn.iter().enumerate() {
        if i < j && nn[j] == i && dataset.labels[i] != dataset.labels[j] {
            let (mi, ma) = if dataset.labels[i] == minority { (i, j) } else { (j, i) };
            links.push(TomekLink {
                minority_index: mi,
                majority_index: ma,
            });
        }
    }
    let mut drop = vec![false; dataset.len()];
    for l in &links {
        drop[l.majority_index] = true;
    }
    let keep: Vec<usize> = (0..dataset.len()).filter(|&i| !drop[i]).collect();
    Ok((links, dataset.subset(&keep)))
}

#[derive(Debug, Clone)]
pub struct ResampleOutcome {
    pub dataset: LabeledDataset,
    pub report: ResampleReport,
}

/// SMOTE to the target proportion, then Tomek-link cleaning.
pub fn smote_tomek(dataset: &LabeledDataset, params: &SmoteParams) -> Result<ResampleOutcome> {
    resample(dataset, ResampleKind::SmoteTomek, params)
}

pub fn resample(dataset: &LabeledDataset, kind: ResampleKind, params: &SmoteParams) -> Result<ResampleOutcome> {
    let before = dataset.class_counts();
    let minority = dataset.minority_class();
    let mut synthetic = 0;
    let mut removed = 0;
    let mut ds = dataset.clone();
    if matches!(kind, ResampleKind::Smote | ResampleKind::SmoteTomek) {
        let s = smote(&ds, params)?;
        synthetic = s.samples.len();
        ds = s.dataset;
    }
    if matches!(kind, ResampleKind::Tomek | ResampleKind::SmoteTomek) {
        let (links, cleaned) = tomek_links_for(&ds, minority)?;
        removed = links.len();
        ds = cleaned;
    }
    let after = ds.class_counts();
    Ok(ResampleOutcome {
        report: ResampleReport {
            kind: kind.to_string(),
            before_three_four: before[&TimeSignature::ThreeFour],
            before_four_four: before[&TimeSignature::FourFour],
            after_three_four: after[&TimeSignature::ThreeFour],
            after_four_four: after[&TimeSignature::FourFour],
            synthetic_samples: synthetic,
            tomek_removals: removed,
        },
        dataset: ds,
    })
}
