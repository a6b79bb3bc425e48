//! Lyrics patterning: phrases → keyword stress vectors → optimized
//! vectors, plus stress-beat-pattern counting and repetition detection.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{
    fallback_syllabify, normalize_word, PronunciationLexicon, RemnantList, StopwordPolicy, StressMark,
};

const PHRASE_DELIMITERS: &[char] = &['\n', '.', ',', ';', ':', '!', '?'];

/// One song's lyrics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LyricsText {
    pub song_id: String,
    pub raw: String,
}

impl LyricsText {
    pub fn new(song_id: impl Into<String>, raw: impl Into<String>) -> Self {
        LyricsText {
            song_id: song_id.into(),
            raw: raw.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phrase {
    pub tokens: Vec<String>,
    /// Byte range of the phrase within [`LyricsText::raw`].
    pub source_span: Range<usize>,
}

/// Stress marks over every syllable of a phrase, in word order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct PhraseVector(pub Vec<StressMark>);

impl PhraseVector {
    pub fn from_digits(digits: &[u8]) -> Self {
        PhraseVector(
            digits
                .iter()
                .map(|d| StressMark::from_digit(*d).expect("stress digit in 0..=2"))
                .collect(),
        )
    }

    pub fn digits(&self) -> Vec<u8> {
        self.0.iter().map(|m| m.digit()).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn primary_count(&self) -> usize {
        self.0.iter().filter(|m| **m == StressMark::Primary).count()
    }

    pub fn marks(&self) -> &[StressMark] {
        &self.0
    }
}

impl fmt::Display for PhraseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Canonical beat-accent segments: a stressed syllable followed by one,
/// two or three unstressed ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StressBeatPattern {
    /// "10"
    Duple,
    /// "100"
    Triple,
    /// "1000"
    Quadruple,
}

impl StressBeatPattern {
    pub const ALL: [StressBeatPattern; 3] = [
        StressBeatPattern::Duple,
        StressBeatPattern::Triple,
        StressBeatPattern::Quadruple,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StressBeatPattern::Duple => "10",
            StressBeatPattern::Triple => "100",
            StressBeatPattern::Quadruple => "1000",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn marks(self) -> Vec<StressMark> {
        let mut m = vec![StressMark::Unstressed; self.len()];
        m[0] = StressMark::Primary;
        m
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        match self {
            StressBeatPattern::Duple => 2,
            StressBeatPattern::Triple => 3,
            StressBeatPattern::Quadruple => 4,
        }
    }
}

impl fmt::Display for StressBeatPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How secondary stress (2) is treated before adjacency suppression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SecondaryStress {
    #[default]
    Unstressed,
    Primary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatterningConfig {
    pub secondary_stress: SecondaryStress,
    /// Turn a 1 into a 0 when the syllable before it is a 1.
    pub suppress_adjacent_stress: bool,
    /// Use the vowel-group heuristic for words missing from the lexicon.
    pub oov_fallback: bool,
}

impl Default for PatterningConfig {
    fn default() -> Self {
        PatterningConfig {
            secondary_stress: SecondaryStress::Unstressed,
            suppress_adjacent_stress: true,
            oov_fallback: true,
        }
    }
}

/// All phrase vectors of one song.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SongPatternSet {
    /// Optimized vectors, one per phrase, in phrase order.
    pub vectors: Vec<PhraseVector>,
    /// Pre-optimization keyword vectors aligned with `vectors`; secondary
    /// stress is still visible here.
    pub keyword_vectors: Vec<PhraseVector>,
    /// Only vectors shared by two or more phrases.
    pub duplicate_groups: BTreeMap<PhraseVector, usize>,
    /// Words that were scored by the out-of-vocabulary heuristic.
    pub oov_words: Vec<String>,
}

impl SongPatternSet {
    pub fn from_vectors(vectors: Vec<PhraseVector>) -> Self {
        let duplicate_groups = find_repetitive_vectors(&vectors);
        SongPatternSet {
            keyword_vectors: vectors.clone(),
            vectors,
            duplicate_groups,
            oov_words: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Keep the phrases whose optimized vector satisfies `keep`, then
    /// recompute the duplicate groups.
    pub fn retain(&mut self, mut keep: impl FnMut(&PhraseVector) -> bool) {
        let mask: Vec<bool> = self.vectors.iter().map(&mut keep).collect();
        let mut it = mask.iter();
        self.vectors.retain(|_| *it.next().unwrap());
        let mut it = mask.iter();
        self.keyword_vectors.retain(|_| *it.next().unwrap());
        self.duplicate_groups = find_repetitive_vectors(&self.vectors);
    }

    /// Whether phrase `i` belongs to a duplicate group.
    pub fn is_repeated(&self, i: usize) -> bool {
        self.duplicate_groups.contains_key(&self.vectors[i])
    }
}

pub fn split_phrases(lyrics: &LyricsText) -> Vec<Phrase> {
    let raw = lyrics.raw.as_str();
    let mut phrases = Vec::new();
    let mut start = 0usize;
    for (pos, c) in raw.char_indices().chain(std::iter::once((raw.len(), '\n'))) {
        if !PHRASE_DELIMITERS.contains(&c) {
            continue;
        }
        let segment = &raw[start..pos];
        let tokens: Vec<String> = segment.split_whitespace().filter_map(clean_token).collect();
        if !tokens.is_empty() {
            let lead = segment.len() - segment.trim_start().len();
            let trail = segment.len() - segment.trim_end().len();
            phrases.push(Phrase {
                tokens,
                source_span: start + lead..pos - trail,
            });
        }
        start = pos + c.len_utf8();
    }
    phrases
}

/// Lowercase, fold apostrophes, drop punctuation except internal `'`/`-`.
fn clean_token(raw: &str) -> Option<String> {
    let norm = normalize_word(raw);
    let kept: String = norm
        .chars()
        .filter(|c| c.is_alphanumeric() || *c == '\'' || *c == '-')
        .collect();
    let trimmed = kept.trim_matches(|c| c == '\'' || c == '-');
    if trimmed.chars().any(char::is_alphabetic) {
        Some(trimmed.to_string())
    } else {
        None
    }
}

/// Keyword-vector construction and optimization over one lexicon/policy.
#[derive(Debug, Clone, Copy)]
pub struct Patterner<'a> {
    pub lexicon: &'a PronunciationLexicon,
    pub stopwords: &'a StopwordPolicy,
    pub remnants: &'a RemnantList,
    pub config: PatterningConfig,
}

struct WordUnit {
    marks: Vec<StressMark>,
    oov: bool,
}

impl<'a> Patterner<'a> {
    pub fn new(
        lexicon: &'a PronunciationLexicon,
        stopwords: &'a StopwordPolicy,
        remnants: &'a RemnantList,
        config: PatterningConfig,
    ) -> Self {
        Patterner {
            lexicon,
            stopwords,
            remnants,
            config,
        }
    }

    fn lookup(&self, word: &str) -> Result<WordUnit> {
        match self.lexicon.lookup_stress(word) {
            Some(p) => Ok(WordUnit {
                marks: p.marks,
                oov: false,
            }),
            None if self.config.oov_fallback => Ok(WordUnit {
                marks: fallback_syllabify(word).marks,
                oov: true,
            }),
            None => Err(Error::NotFound(word.to_string())),
        }
    }

    /// Whole-token lookup first; on a miss, split at apostrophes (dropping
    /// contraction remnants) or hyphens and score each part.
    fn token_units(&self, token: &str) -> Result<Vec<(String, WordUnit)>> {
        if self.lexicon.contains(token) {
            return Ok(vec![(token.to_string(), self.lookup(token)?)]);
        }
        let parts: Vec<String> = if token.contains('\'') {
            token
                .split('\'')
                .filter(|p| !p.is_empty() && !self.remnants.contains(p))
                .flat_map(|p| p.split('-'))
                .filter(|p| !p.is_empty())
                .map(str::to_string)
                .collect()
        } else if token.contains('-') {
            token.split('-').filter(|p| !p.is_empty()).map(str::to_string).collect()
        } else {
            vec![token.to_string()]
        };
        parts
            .into_iter()
            .map(|p| {
                let u = self.lookup(&p)?;
                Ok((p, u))
            })
            .collect()
    }

    fn is_keyword(&self, word: &str) -> bool {
        if !self.stopwords.is_stopword(word) {
            return true;
        }
        // pronoun contractions such as "i'm" or "we're" stay keywords
        match word.split_once('\'') {
            Some((stem, _)) => self.stopwords.retained_pronouns.contains(stem),
            None => false,
        }
    }

    fn keyword_vector_with_oov(&self, phrase: &Phrase) -> Result<(PhraseVector, Vec<String>)> {
        let mut marks = Vec::new();
        let mut oov = Vec::new();
        for token in &phrase.tokens {
            let token_keyword = self.is_keyword(token);
            for (part, unit) in self.token_units(token)? {
                if unit.oov {
                    oov.push(part.clone());
                }
                let keyword = token_keyword && (part == *token || self.is_keyword(&part));
                if keyword {
                    marks.extend(unit.marks);
                } else {
                    marks.extend(std::iter::repeat_n(StressMark::Unstressed, unit.marks.len()));
                }
            }
        }
        Ok((PhraseVector(marks), oov))
    }

    pub fn keyword_vector(&self, phrase: &Phrase) -> Result<PhraseVector> {
        self.keyword_vector_with_oov(phrase).map(|(v, _)| v)
    }

    pub fn optimize(&self, v: &PhraseVector) -> PhraseVector {
        optimize_vector_with(v, &self.config)
    }

    pub fn pattern(&self, lyrics: &LyricsText) -> Result<SongPatternSet> {
        let mut keyword_vectors = Vec::new();
        let mut vectors = Vec::new();
        let mut oov_words = Vec::new();
        for phrase in split_phrases(lyrics) {
            let (kv, oov) = self.keyword_vector_with_oov(&phrase)?;
            vectors.push(self.optimize(&kv));
            keyword_vectors.push(kv);
            oov_words.extend(oov);
        }
        let duplicate_groups = find_repetitive_vectors(&vectors);
        Ok(SongPatternSet {
            vectors,
            keyword_vectors,
            duplicate_groups,
            oov_words,
        })
    }

    /// Tabular dump: per phrase, one line of syllable columns (word on
    /// its first syllable, `-` on continuations) above one line of marks.
    pub fn diagnostic_dump(&self, lyrics: &LyricsText) -> Result<String> {
        let mut out = String::new();
        for phrase in split_phrases(lyrics) {
            let mut heads = Vec::new();
            let mut marks = Vec::new();
            for token in &phrase.tokens {
                let keyword = self.is_keyword(token);
                for (part, unit) in self.token_units(token)? {
                    let keep = keyword && (part == *token || self.is_keyword(&part));
                    for (i, m) in unit.marks.iter().enumerate() {
                        heads.push(if i == 0 { part.clone() } else { "-".to_string() });
                        marks.push(if keep { m.digit() } else { 0 }.to_string());
                    }
                }
            }
            out.push_str(&heads.join("\t"));
            out.push('\n');
            out.push_str(&marks.join("\t"));
            out.push('\n');
        }
        Ok(out)
    }
}

/// Keyword vector with default remnants and configuration.
pub fn keyword_vector(
    phrase: &Phrase,
    lexicon: &PronunciationLexicon,
    policy: &StopwordPolicy,
) -> Result<PhraseVector> {
    let remnants = RemnantList::default();
    Patterner::new(lexicon, policy, &remnants, PatterningConfig::default()).keyword_vector(phrase)
}

pub fn optimize_vector(v: &PhraseVector) -> PhraseVector {
    optimize_vector_with(v, &PatterningConfig::default())
}

pub fn optimize_vector_with(v: &PhraseVector, config: &PatterningConfig) -> PhraseVector {
    let secondary = match config.secondary_stress {
        SecondaryStress::Unstressed => StressMark::Unstressed,
        SecondaryStress::Primary => StressMark::Primary,
    };
    let mut out: Vec<StressMark> = Vec::with_capacity(v.len());
    for &m in &v.0 {
        let mut m = if m == StressMark::Secondary { secondary } else { m };
        if config.suppress_adjacent_stress && m == StressMark::Primary && out.last() == Some(&StressMark::Primary) {
            m = StressMark::Unstressed;
        }
        out.push(m);
    }
    PhraseVector(out)
}

pub fn lyrics_patterning(
    lyrics: &LyricsText,
    lexicon: &PronunciationLexicon,
    policy: &StopwordPolicy,
) -> Result<SongPatternSet> {
    let remnants = RemnantList::default();
    Patterner::new(lexicon, policy, &remnants, PatterningConfig::default()).pattern(lyrics)
}

/// Non-overlapping occurrences of `p`, scanning greedily left to right.
pub fn count_pattern(v: &PhraseVector, p: StressBeatPattern) -> usize {
    let pat = p.marks();
    let marks = v.marks();
    let mut count = 0;
    let mut i = 0;
    while i + pat.len() <= marks.len() {
        if marks[i..i + pat.len()] == pat[..] {
            count += 1;
            i += pat.len();
        } else {
            i += 1;
        }
    }
    count
}

pub fn find_repetitive_vectors(vectors: &[PhraseVector]) -> BTreeMap<PhraseVector, usize> {
    let mut counts: BTreeMap<PhraseVector, usize> = BTreeMap::new();
    for v in vectors {
        *counts.entry(v.clone()).or_default() += 1;
    }
    counts.retain(|_, c| *c >= 2);
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(d: &[u8]) -> PhraseVector {
        PhraseVector::from_digits(d)
    }

    fn phrase(words: &[&str]) -> Phrase {
        Phrase {
            tokens: words.iter().map(|w| w.to_string()).collect(),
            source_span: 0..0,
        }
    }

    #[test]
    fn splits_on_lines_and_punctuation() {
        let p = split_phrases(&LyricsText::new("s", "Hello, world!\nBye"));
        let toks: Vec<Vec<String>> = p.iter().map(|p| p.tokens.clone()).collect();
        assert_eq!(toks, vec![vec!["hello"], vec!["world"], vec!["bye"]]);
        assert_eq!(&"Hello, world!\nBye"[p[1].source_span.clone()], "world");
        assert!(split_phrases(&LyricsText::new("s", "")).is_empty());
        assert_eq!(
            split_phrases(&LyricsText::new("s", "like a bird"))[0].tokens,
            vec!["like", "a", "bird"]
        );
    }

    #[test]
    fn tokens_keep_internal_apostrophes() {
        let p = split_phrases(&LyricsText::new("s", "My head\u{2019}s \"turning\" (around) -- 42"));
        assert_eq!(p[0].tokens, vec!["my", "head's", "turning", "around"]);
    }

    #[test]
    fn keyword_vectors_from_figure_rows() {
        let lex = PronunciationLexicon::bundled();
        let pol = StopwordPolicy::default();
        let kv = |w: &[&str]| keyword_vector(&phrase(w), lex, &pol).unwrap().digits();
        assert_eq!(kv(&["my", "hands", "are", "clapping"]), vec![0, 1, 0, 1, 0]);
        assert_eq!(kv(&["like", "a", "bird"]), vec![0, 0, 1]);
        assert_eq!(kv(&["my", "head's", "turning", "around"]), vec![0, 1, 1, 0, 0, 1]);
    }

    #[test]
    fn contraction_split_drops_remnant() {
        let lex = PronunciationLexicon::parse("WE  W IY1\nVE  V IY1\nARRIVED  ER0 AY1 V D\n", "t").unwrap();
        let pol = StopwordPolicy::default();
        let v = keyword_vector(&phrase(&["we've", "arrived"]), &lex, &pol).unwrap();
        assert_eq!(v.digits(), vec![1, 0, 1]);
    }

    #[test]
    fn oov_without_fallback_errors() {
        let lex = PronunciationLexicon::parse("A  AH0\n", "t").unwrap();
        let pol = StopwordPolicy::default();
        let rem = RemnantList::default();
        let cfg = PatterningConfig {
            oov_fallback: false,
            ..Default::default()
        };
        let p = Patterner::new(&lex, &pol, &rem, cfg);
        assert!(matches!(
            p.keyword_vector(&phrase(&["zorble"])),
            Err(Error::NotFound(_))
        ));
        let p = Patterner::new(&lex, &pol, &rem, PatterningConfig::default());
        let set = p.pattern(&LyricsText::new("s", "zorble")).unwrap();
        assert_eq!(set.oov_words, vec!["zorble"]);
    }

    #[test]
    fn optimization_rules() {
        assert_eq!(optimize_vector(&pv(&[1, 1, 0])).digits(), vec![1, 0, 0]);
        assert_eq!(optimize_vector(&pv(&[1, 0, 1])).digits(), vec![1, 0, 1]);
        assert_eq!(optimize_vector(&pv(&[1, 2])).digits(), vec![1, 0]);
        assert_eq!(optimize_vector(&pv(&[1, 1, 1])).digits(), vec![1, 0, 1]);
    }

    #[test]
    fn pattern_counting() {
        assert_eq!(count_pattern(&pv(&[1, 0, 1, 0, 0]), StressBeatPattern::Duple), 2);
        assert_eq!(count_pattern(&pv(&[1, 0, 0, 0]), StressBeatPattern::Quadruple), 1);
        assert_eq!(count_pattern(&pv(&[0, 0]), StressBeatPattern::Duple), 0);
        assert_eq!(count_pattern(&pv(&[1, 0, 0, 0]), StressBeatPattern::Triple), 1);
    }

    #[test]
    fn repetition_groups() {
        let g = find_repetitive_vectors(&[pv(&[0, 1]), pv(&[0, 1]), pv(&[1, 0])]);
        assert_eq!(g.len(), 1);
        assert_eq!(g[&pv(&[0, 1])], 2);
        assert!(find_repetitive_vectors(&[pv(&[0, 1]), pv(&[1, 0])]).is_empty());
        assert!(find_repetitive_vectors(&[]).is_empty());
    }

    #[test]
    fn song_level_duplicates() {
        let lex = PronunciationLexicon::bundled();
        let pol = StopwordPolicy::default();
        let one = lyrics_patterning(&LyricsText::new("a", "my feet are jumping"), lex, &pol).unwrap();
        assert!(one.duplicate_groups.is_empty());
        let two = lyrics_patterning(
            &LyricsText::new("b", "my feet are jumping\nmy feet are jumping"),
            lex,
            &pol,
        )
        .unwrap();
        assert_eq!(two.duplicate_groups.len(), 1);
        assert_eq!(two.duplicate_groups[&pv(&[0, 1, 0, 1, 0])], 2);
    }

    #[test]
    fn dump_has_two_lines_per_phrase() {
        let lex = PronunciationLexicon::bundled();
        let pol = StopwordPolicy::default();
        let rem = RemnantList::default();
        let p = Patterner::new(lex, &pol, &rem, PatterningConfig::default());
        let dump = p.diagnostic_dump(&LyricsText::new("s", "like a bird\nflying")).unwrap();
        assert_eq!(dump, "like\ta\tbird\n0\t0\t1\nflying\t-\n1\t0\n");
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn vector() -> impl Strategy<Value = PhraseVector> {
            proptest::collection::vec(0u8..=2, 0..24).prop_map(|d| PhraseVector::from_digits(&d))
        }

        proptest! {
            #[test]
            fn optimize_idempotent_and_no_adjacent_primary(v in vector()) {
                let o = optimize_vector(&v);
                prop_assert_eq!(o.len(), v.len());
                prop_assert_eq!(optimize_vector(&o), o.clone());
                prop_assert!(o.primary_count() <= v.primary_count());
                prop_assert!(!o.marks().windows(2).any(|w| w[0] == StressMark::Primary && w[1] == StressMark::Primary));
            }

            #[test]
            fn count_bounds(v in vector()) {
                let v = optimize_vector(&v);
                for p in StressBeatPattern::ALL {
                    prop_assert!(count_pattern(&v, p) <= v.len() / p.len());
                    prop_assert!(count_pattern(&v, p) <= v.primary_count());
                }
            }

            #[test]
            fn duplicate_counts_sum_to_participants(vs in proptest::collection::vec(proptest::collection::vec(0u8..=1, 1..4), 0..12)) {
                let vs: Vec<PhraseVector> = vs.iter().map(|d| PhraseVector::from_digits(d)).collect();
                let groups = find_repetitive_vectors(&vs);
                let participants = vs.iter().filter(|v| groups.contains_key(v)).count();
                prop_assert_eq!(groups.values().sum::<usize>(), participants);
                prop_assert!(groups.values().all(|c| *c >= 2));
            }

            #[test]
            fn keyword_vector_length_is_syllable_sum(words in proptest::collection::vec("(my|hands|are|clapping|bird|beautiful|the|zorble|i|going)", 1..8)) {
                let lex = PronunciationLexicon::bundled();
                let pol = StopwordPolicy::default();
                let ph = Phrase { tokens: words.clone(), source_span: 0..0 };
                let v = keyword_vector(&ph, lex, &pol).unwrap();
                let expected: usize = words.iter().map(|w| crate::lexicon::stress_pattern(lex, w, true).unwrap().syllables()).sum();
                prop_assert_eq!(v.len(), expected);
            }
        }
    }
}
