//! Song-level features over the structural type × stress beat pattern ×
//! statistic grid, and labeled feature matrices.

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::patterning::{count_pattern, LyricsText, Patterner, SongPatternSet, StressBeatPattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StructuralType {
    /// Every phrase of the song.
    Overall,
    /// Only phrases whose vector occurs at least twice in the song.
    Repeat,
}

impl StructuralType {
    pub const ALL: [StructuralType; 2] = [StructuralType::Overall, StructuralType::Repeat];

    pub fn name(self) -> &'static str {
        match self {
            StructuralType::Overall => "overall",
            StructuralType::Repeat => "repeat",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Statistic {
    Count,
    Mean,
    Mode,
}

impl Statistic {
    pub const ALL: [Statistic; 3] = [Statistic::Count, Statistic::Mean, Statistic::Mode];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Count => "count",
            Statistic::Mean => "mean",
            Statistic::Mode => "mode",
        }
    }
}

/// Selected subsets of each feature category. Stored in canonical order
/// so that feature layout does not depend on how a feature spec was written.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureSpec {
    structural: Vec<StructuralType>,
    patterns: Vec<StressBeatPattern>,
    statistics: Vec<Statistic>,
}

impl FeatureSpec {
    pub fn new(
        structural: impl IntoIterator<Item = StructuralType>,
        patterns: impl IntoIterator<Item = StressBeatPattern>,
        statistics: impl IntoIterator<Item = Statistic>,
    ) -> Result<Self> {
        fn canon<T: Ord>(it: impl IntoIterator<Item = T>) -> Vec<T> {
            let mut v: Vec<T> = it.into_iter().collect();
            v.sort();
            v.dedup();
            v
        }
        let spec = FeatureSpec {
            structural: canon(structural),
            patterns: canon(patterns),
            statistics: canon(statistics),
        };
        if spec.structural.is_empty() || spec.patterns.is_empty() || spec.statistics.is_empty() {
            return Err(Error::argument("feature spec needs at least one entry per category"));
        }
        Ok(spec)
    }

    /// All 2 × 3 × 3 = 18 features.
    pub fn full() -> Self {
        FeatureSpec::new(StructuralType::ALL, StressBeatPattern::ALL, Statistic::ALL).unwrap()
    }

    pub fn structural(&self) -> &[StructuralType] {
        &self.structural
    }

    pub fn patterns(&self) -> &[StressBeatPattern] {
        &self.patterns
    }

    pub fn statistics(&self) -> &[Statistic] {
        &self.statistics
    }

    pub fn dimensionality(&self) -> usize {
        self.structural.len() * self.patterns.len() * self.statistics.len()
    }

    /// Cells in layout order: structural outer, pattern middle, statistic inner.
    pub fn cells(&self) -> impl Iterator<Item = (StructuralType, StressBeatPattern, Statistic)> + '_ {
        self.structural.iter().flat_map(move |&s| {
            self.patterns
                .iter()
                .flat_map(move |&p| self.statistics.iter().map(move |&t| (s, p, t)))
        })
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.cells().map(|(s, p, t)| feature_name(s, p, t)).collect()
    }

    /// Recover the feature spec from a header, requiring the canonical layout.
    pub fn from_feature_names(names: &[String]) -> Result<Self> {
        let mut structural = Vec::new();
        let mut patterns = Vec::new();
        let mut statistics = Vec::new();
        for name in names {
            let mut parts = name.split('_');
            let (Some(s), Some(p), Some(t), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
                return Err(Error::format(format!("bad feature name `{name}`")));
            };
            structural.push(parse_structural(s)?);
            patterns.push(parse_pattern(p)?);
            statistics.push(parse_statistic(t)?);
        }
        let spec = FeatureSpec::new(structural, patterns, statistics)?;
        if spec.feature_names() != names {
            return Err(Error::format(
                "feature columns do not form a complete grid in canonical order",
            ));
        }
        Ok(spec)
    }
}

pub fn feature_name(s: StructuralType, p: StressBeatPattern, t: Statistic) -> String {
    format!("{}_{}_{}", s.name(), p.name(), t.name())
}

fn parse_structural(s: &str) -> Result<StructuralType> {
    match s.trim().to_ascii_lowercase().as_str() {
        "overall" | "general" => Ok(StructuralType::Overall),
        "repeat" | "repetitive" => Ok(StructuralType::Repeat),
        other => Err(Error::argument(format!("unknown structural type `{other}`"))),
    }
}

fn parse_pattern(s: &str) -> Result<StressBeatPattern> {
    StressBeatPattern::from_name(s.trim()).ok_or_else(|| Error::argument(format!("unknown stress beat pattern `{s}`")))
}

fn parse_statistic(s: &str) -> Result<Statistic> {
    match s.trim().to_ascii_lowercase().as_str() {
        "count" => Ok(Statistic::Count),
        "mean" => Ok(Statistic::Mean),
        "mode" => Ok(Statistic::Mode),
        other => Err(Error::argument(format!("unknown statistic `{other}`"))),
    }
}

/// `overall,repeat:10,100,1000:count,mean,mode`
impl FromStr for FeatureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let groups: Vec<&str> = s.split(':').collect();
        if groups.len() != 3 {
            return Err(Error::argument(format!(
                "feature spec `{s}` must have three `:`-separated lists"
            )));
        }
        let list = |g: &str| -> Vec<String> {
            g.split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(str::to_string)
                .collect()
        };
        let structural = list(groups[0])
            .iter()
            .map(|x| parse_structural(x))
            .collect::<Result<Vec<_>>>()?;
        let patterns = list(groups[1])
            .iter()
            .map(|x| parse_pattern(x))
            .collect::<Result<Vec<_>>>()?;
        let statistics = list(groups[2])
            .iter()
            .map(|x| parse_statistic(x))
            .collect::<Result<Vec<_>>>()?;
        FeatureSpec::new(structural, patterns, statistics)
    }
}

impl fmt::Display for FeatureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<&str>| v.join(",");
        write!(
            f,
            "{}:{}:{}",
            join(self.structural.iter().map(|s| s.name()).collect()),
            join(self.patterns.iter().map(|p| p.name()).collect()),
            join(self.statistics.iter().map(|t| t.name()).collect())
        )
    }
}

/// What a repeat-phrase contributes to the repeat statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RepeatStatistic {
    /// Pattern occurrences in the phrase.
    #[default]
    Occurrences,
    /// 1 if the phrase contains the pattern at all.
    Phrases,
}

impl FromStr for RepeatStatistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "occurrences" => Ok(RepeatStatistic::Occurrences),
            "phrases" => Ok(RepeatStatistic::Phrases),
            other => Err(Error::argument(format!("unknown repeat statistic `{other}`"))),
        }
    }
}

impl fmt::Display for RepeatStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RepeatStatistic::Occurrences => "occurrences",
            RepeatStatistic::Phrases => "phrases",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureOptions {
    pub noise_removal: bool,
    pub repeat_statistic: RepeatStatistic,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        FeatureOptions {
            noise_removal: true,
            repeat_statistic: RepeatStatistic::Occurrences,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhraseStatistics {
    pub count: f64,
    pub mean: f64,
    pub mode: f64,
}

impl PhraseStatistics {
    pub fn get(&self, t: Statistic) -> f64 {
        match t {
            Statistic::Count => self.count,
            Statistic::Mean => self.mean,
            Statistic::Mode => self.mode,
        }
    }
}

/// Drop vectors shorter than two marks or without any stressed mark.
pub fn remove_noisy_vectors(s: &SongPatternSet) -> SongPatternSet {
    let mut out = s.clone();
    out.retain(|v| v.len() >= 2 && v.primary_count() > 0);
    out
}

pub fn phrase_statistics(
    s: &SongPatternSet,
    structural: StructuralType,
    p: StressBeatPattern,
    repeat_statistic: RepeatStatistic,
) -> PhraseStatistics {
    let per_phrase: Vec<usize> = (0..s.len())
        .filter(|&i| structural == StructuralType::Overall || s.is_repeated(i))
        .map(|i| {
            let c = count_pattern(&s.vectors[i], p);
            match (structural, repeat_statistic) {
                (StructuralType::Repeat, RepeatStatistic::Phrases) => usize::from(c > 0),
                _ => c,
            }
        })
        .collect();
    if per_phrase.is_empty() {
        return PhraseStatistics {
            count: 0.0,
            mean: 0.0,
            mode: 0.0,
        };
    }
    let total: usize = per_phrase.iter().sum();
    let mut freq: BTreeMap<usize, usize> = BTreeMap::new();
    for c in &per_phrase {
        *freq.entry(*c).or_default() += 1;
    }
    // BTreeMap iterates ascending, so the first maximum is the smallest value.
    let mut mode = 0;
    let mut best = 0;
    for (value, n) in freq {
        if n > best {
            best = n;
            mode = value;
        }
    }
    PhraseStatistics {
        count: total as f64,
        mean: total as f64 / per_phrase.len() as f64,
        mode: mode as f64,
    }
}

pub fn generate_features(s: &SongPatternSet, spec: &FeatureSpec) -> Result<FeatureVector> {
    generate_features_with(s, spec, RepeatStatistic::default())
}

pub fn generate_features_with(
    s: &SongPatternSet,
    spec: &FeatureSpec,
    repeat_statistic: RepeatStatistic,
) -> Result<FeatureVector> {
    if s.is_empty() {
        return Err(Error::degenerate("song has no phrase vectors"));
    }
    let mut values = Vec::with_capacity(spec.dimensionality());
    for &st in spec.structural() {
        for &p in spec.patterns() {
            let stats = phrase_statistics(s, st, p, repeat_statistic);
            for &t in spec.statistics() {
                values.push(stats.get(t));
            }
        }
    }
    Ok(FeatureVector {
        names: spec.feature_names(),
        values,
    })
}

/// Class label. Four-four is the positive class throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TimeSignature {
    #[serde(rename = "3/4")]
    ThreeFour,
    #[serde(rename = "4/4")]
    FourFour,
}

impl TimeSignature {
    pub const ALL: [TimeSignature; 2] = [TimeSignature::ThreeFour, TimeSignature::FourFour];

    pub fn as_str(self) -> &'static str {
        match self {
            TimeSignature::ThreeFour => "3/4",
            TimeSignature::FourFour => "4/4",
        }
    }

    pub fn is_positive(self) -> bool {
        self == TimeSignature::FourFour
    }

    pub fn from_positive(positive: bool) -> Self {
        if positive {
            TimeSignature::FourFour
        } else {
            TimeSignature::ThreeFour
        }
    }

    /// 1.0 for four-four, 0.0 otherwise.
    pub fn target(self) -> f64 {
        if self.is_positive() {
            1.0
        } else {
            0.0
        }
    }

    pub fn other(self) -> Self {
        match self {
            TimeSignature::ThreeFour => TimeSignature::FourFour,
            TimeSignature::FourFour => TimeSignature::ThreeFour,
        }
    }
}

impl fmt::Display for TimeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TimeSignature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "3/4" => Ok(TimeSignature::ThreeFour),
            "4/4" => Ok(TimeSignature::FourFour),
            other => Err(Error::format(format!("unknown time signature `{other}`"))),
        }
    }
}

/// Feature matrix with aligned labels and song identifiers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledDataset {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<TimeSignature>,
    pub ids: Vec<String>,
}

impl LabeledDataset {
    pub fn new(feature_names: Vec<String>) -> Self {
        LabeledDataset {
            feature_names,
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<f64>, label: TimeSignature, id: impl Into<String>) {
        debug_assert_eq!(row.len(), self.feature_names.len());
        self.rows.push(row);
        self.labels.push(label);
        self.ids.push(id.into());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dimensionality(&self) -> usize {
        self.feature_names.len()
    }

    pub fn class_count(&self, class: TimeSignature) -> usize {
        self.labels.iter().filter(|l| **l == class).count()
    }

    pub fn class_counts(&self) -> BTreeMap<TimeSignature, usize> {
        TimeSignature::ALL.iter().map(|c| (*c, self.class_count(*c))).collect()
    }

    /// Smaller class; ties resolve to three-four.
    pub fn minority_class(&self) -> TimeSignature {
        if self.class_count(TimeSignature::FourFour) < self.class_count(TimeSignature::ThreeFour) {
            TimeSignature::FourFour
        } else {
            TimeSignature::ThreeFour
        }
    }

    pub fn targets(&self) -> Vec<f64> {
        self.labels.iter().map(|l| l.target()).collect()
    }

    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
        }
    }

    /// Keep only the columns named by `spec`.
    pub fn select_features(&self, spec: &FeatureSpec) -> Result<LabeledDataset> {
        let cols: Vec<usize> = spec
            .feature_names()
            .iter()
            .map(|n| {
                self.feature_names
                    .iter()
                    .position(|f| f == n)
                    .ok_or_else(|| Error::argument(format!("dataset has no feature `{n}`")))
            })
            .collect::<Result<_>>()?;
        Ok(LabeledDataset {
            feature_names: spec.feature_names(),
            rows: self.rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect(),
            labels: self.labels.clone(),
            ids: self.ids.clone(),
        })
    }

    /// Header of feature names followed by `label` and `id` columns.
    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = self.feature_names.clone();
        header.push("label".into());
        header.push("id".into());
        wtr.write_record(&header)?;
        for ((row, label), id) in self.rows.iter().zip(&self.labels).zip(&self.ids) {
            let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            rec.push(label.to_string());
            rec.push(id.clone());
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(|e| Error::format(e.to_string()))?;
        Ok(())
    }

    pub fn read_csv<R: io::Read>(r: R) -> Result<LabeledDataset> {
        let mut rdr = csv::Reader::from_reader(r);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header.len() < 3 || header[header.len() - 2] != "label" || header[header.len() - 1] != "id" {
            return Err(Error::format("features CSV must end with `label,id` columns"));
        }
        let d = header.len() - 2;
        let mut ds = LabeledDataset::new(header[..d].to_vec());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            let row = (0..d)
                .map(|c| {
                    rec[c].parse::<f64>().map_err(|e| Error::Parse {
                        line,
                        message: format!("column `{}`: {e}", header[c]),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let label = rec[d].parse::<TimeSignature>().map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            ds.push(row, label, &rec[d + 1]);
        }
        Ok(ds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedSong {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct MatrixOutcome {
    pub dataset: LabeledDataset,
    pub skipped: Vec<SkippedSong>,
    /// Total number of words scored by the out-of-vocabulary heuristic.
    pub oov_words: usize,
}

/// Lyrics → feature vector pipeline for one configuration.
#[derive(Debug, Clone)]
pub struct Featurizer<'a> {
    pub patterner: Patterner<'a>,
    pub spec: FeatureSpec,
    pub options: FeatureOptions,
}

impl<'a> Featurizer<'a> {
    pub fn new(patterner: Patterner<'a>, spec: FeatureSpec, options: FeatureOptions) -> Self {
        Featurizer {
            patterner,
            spec,
            options,
        }
    }

    pub fn pattern_set(&self, lyrics: &LyricsText) -> Result<SongPatternSet> {
        let set = self.patterner.pattern(lyrics)?;
        Ok(if self.options.noise_removal {
            remove_noisy_vectors(&set)
        } else {
            set
        })
    }

    pub fn featurize(&self, lyrics: &LyricsText) -> Result<FeatureVector> {
        let set = self.pattern_set(lyrics)?;
        generate_features_with(&set, &self.spec, self.options.repeat_statistic)
    }

    /// Row `i` is song `i`; songs with degenerate input are skipped.
    pub fn build_matrix(&self, corpus: &[(LyricsText, TimeSignature)]) -> Result<MatrixOutcome> {
        if corpus.is_empty() {
            return Err(Error::argument("empty corpus"));
        }
        let results: Vec<Result<(FeatureVector, usize)>> = corpus
            .par_iter()
            .map(|(lyrics, _)| {
                let set = self.pattern_set(lyrics)?;
                let fv = generate_features_with(&set, &self.spec, self.options.repeat_statistic)?;
                Ok((fv, set.oov_words.len()))
            })
            .collect();
        let mut dataset = LabeledDataset::new(self.spec.feature_names());
        let mut skipped = Vec::new();
        let mut oov_words = 0;
        for ((lyrics, label), res) in corpus.iter().zip(results) {
            match res {
                Ok((fv, oov)) => {
                    dataset.push(fv.values, *label, lyrics.song_id.clone());
                    oov_words += oov;
                }
                Err(Error::Degenerate(reason)) => skipped.push(SkippedSong {
                    id: lyrics.song_id.clone(),
                    reason,
                }),
                Err(e) => return Err(e),
            }
        }
        Ok(MatrixOutcome {
            dataset,
            skipped,
            oov_words,
        })
    }
}
