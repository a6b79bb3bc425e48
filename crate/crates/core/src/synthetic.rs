//! Seeded generator for labeled benchmark corpora.
//!
//! Songs are assembled from dictionary words with known stress shapes.
//! Three-four songs lean on first-stressed three-syllable words (`1 0 0`)
//! and carry them in repeated chorus lines; four-four songs lean on
//! two-syllable trochees (`1 0`) and on trochees padded with two
//! unstressed function words (`1 0 0 0`). A configurable share of lines
//! is drawn from the other meter's vocabulary.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::CorpusRecord;
use crate::features::TimeSignature;

/// Stress 1 0 0.
pub const DACTYLS: &[&str] = &[
    "beautiful",
    "memory",
    "wonderful",
    "family",
    "yesterday",
    "carefully",
    "tenderly",
    "gentleman",
    "melody",
    "holiday",
    "cinnamon",
    "butterfly",
    "harmony",
    "mystery",
    "poetry",
    "victory",
    "energy",
    "galaxy",
    "elephant",
    "celebrate",
];

/// Stress 1 0.
pub const TROCHEES: &[&str] = &[
    "happy", "dancing", "morning", "river", "golden", "singing", "moving", "shining", "wonder", "silver", "summer",
    "winter", "mother", "father", "flower", "water", "beauty", "lovely", "lady", "sunny", "country", "running",
    "jumping", "party", "little", "baby",
];

/// Unstressed one-syllable function words.
pub const PADDING: &[&str] = &["the", "a", "and", "in", "of", "to", "with", "on", "for", "at"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    pub songs: usize,
    /// Share of three-four songs.
    pub minority_fraction: f64,
    /// Probability that a verse line uses the other meter's vocabulary;
    /// chorus lines use half of it.
    pub line_noise: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            songs: 1000,
            minority_fraction: 0.1,
            line_noise: 0.25,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LineStyle {
    Triple,
    Duple,
    Quadruple,
}

fn pick<'a, R: Rng>(rng: &mut R, words: &[&'a str]) -> &'a str {
    words.choose(rng).copied().expect("nonempty word list")
}

fn line<R: Rng>(rng: &mut R, style: LineStyle) -> String {
    let mut words: Vec<&str> = Vec::new();
    match style {
        LineStyle::Triple => {
            for _ in 0..rng.gen_range(2..=4) {
                words.push(pick(rng, DACTYLS));
            }
        }
        LineStyle::Duple => {
            for _ in 0..rng.gen_range(3..=4) {
                words.push(pick(rng, TROCHEES));
            }
        }
        LineStyle::Quadruple => {
            for _ in 0..rng.gen_range(2..=3) {
                words.push(pick(rng, TROCHEES));
                words.push(pick(rng, PADDING));
                words.push(pick(rng, PADDING));
            }
        }
    }
    // an unstressed pickup leaves the stress grouping intact
    if rng.gen_bool(0.3) {
        words.insert(0, pick(rng, PADDING));
    }
    words.join(" ")
}

const VERSES: std::ops::RangeInclusive<usize> = 2..=7;
const VERSE_LINES: std::ops::RangeInclusive<usize> = 3..=5;

fn song<R: Rng>(rng: &mut R, label: TimeSignature, noise: f64) -> String {
    let four_four_style = if rng.gen_bool(0.5) {
        LineStyle::Duple
    } else {
        LineStyle::Quadruple
    };
    let (home, away) = match label {
        TimeSignature::ThreeFour => (LineStyle::Triple, four_four_style),
        TimeSignature::FourFour => (four_four_style, LineStyle::Triple),
    };
    let styled_line = |rng: &mut R, noise: f64| {
        let s = if rng.gen_bool(noise) { away } else { home };
        line(rng, s)
    };
    // choruses repeat, so a stray chorus line weighs more than a verse line
    let chorus: Vec<String> = (0..rng.gen_range(1..=2))
        .map(|_| styled_line(rng, noise / 2.0))
        .collect();
    let mut lines = Vec::new();
    for section in 0..rng.gen_range(VERSES) {
        for _ in 0..rng.gen_range(VERSE_LINES) {
            lines.push(styled_line(rng, noise));
        }
        if section > 0 || rng.gen_bool(0.5) {
            lines.extend(chorus.iter().cloned());
        }
    }
    lines.extend(chorus.iter().cloned());
    lines.join("\n")
}

/// `round(songs × minority_fraction)` three-four songs, shuffled among the
/// four-four ones.
pub fn generate_corpus(cfg: &SyntheticConfig) -> Vec<CorpusRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let minority = (cfg.songs as f64 * cfg.minority_fraction).round() as usize;
    let mut labels: Vec<TimeSignature> = (0..cfg.songs)
        .map(|i| {
            if i < minority {
                TimeSignature::ThreeFour
            } else {
                TimeSignature::FourFour
            }
        })
        .collect();
    labels.shuffle(&mut rng);
    labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| CorpusRecord {
            id: format!("song-{i:05}"),
            title: format!("Synthetic {i}"),
            lyrics: song(&mut rng, label, cfg.line_noise),
            time_signature: label,
        })
        .collect()
}
