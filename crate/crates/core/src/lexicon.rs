//! Pronunciation dictionary, per-word stress patterns, stopwords and
//! contraction remnants.
//!
//! The dictionary uses the CMU plain-text layout: one entry per line,
//! `WORD  PH1 PH2 ...`, comment lines starting with `;;;`, and alternate
//! pronunciations written as `WORD(2)`. Vowel phonemes carry a trailing
//! stress digit (`0`, `1` or `2`).

use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUNDLED_DICTIONARY: &str = include_str!("../data/cmudict.txt");

/// Lexical stress of one syllable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StressMark {
    Unstressed,
    Primary,
    Secondary,
}

impl StressMark {
    pub fn from_digit(d: u8) -> Option<Self> {
        match d {
            0 => Some(StressMark::Unstressed),
            1 => Some(StressMark::Primary),
            2 => Some(StressMark::Secondary),
            _ => None,
        }
    }

    pub fn digit(self) -> u8 {
        match self {
            StressMark::Unstressed => 0,
            StressMark::Primary => 1,
            StressMark::Secondary => 2,
        }
    }
}

impl fmt::Display for StressMark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.digit())
    }
}

/// Stress marks of one word, one per syllable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct StressPattern {
    pub marks: Vec<StressMark>,
}

impl StressPattern {
    pub fn syllables(&self) -> usize {
        self.marks.len()
    }

    pub fn digits(&self) -> Vec<u8> {
        self.marks.iter().map(|m| m.digit()).collect()
    }
}

/// A parsed pronouncing dictionary. Immutable after load.
#[derive(Debug, Clone)]
pub struct PronunciationLexicon {
    entries: HashMap<String, Box<str>>,
    alternates: HashMap<String, Vec<Box<str>>>,
    source_path: PathBuf,
}

impl PronunciationLexicon {
    /// Parse dictionary text. Keys are stored uppercase.
    pub fn parse(text: &str, source_path: impl Into<PathBuf>) -> Result<Self> {
        let mut entries: HashMap<String, Box<str>> = HashMap::new();
        let mut alternates: HashMap<String, Vec<Box<str>>> = HashMap::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with(";;;") {
                continue;
            }
            let (word, phones) = match line.split_once(char::is_whitespace) {
                Some((w, p)) => (w, p.trim()),
                None => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("entry `{line}` has no phonemes"),
                    })
                }
            };
            if phones.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("entry `{word}` has no phonemes"),
                });
            }
            for ph in phones.split_whitespace() {
                if !is_valid_phoneme(ph) {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("malformed phoneme `{ph}`"),
                    });
                }
            }
            let phones: Box<str> = phones.split_whitespace().collect::<Vec<_>>().join(" ").into();

            match split_variant(word) {
                Some(base) => alternates.entry(base.to_uppercase()).or_default().push(phones),
                None => {
                    let key = word.to_uppercase();
                    match entries.entry(key) {
                        // A repeated headword behaves like a listed alternate.
                        Entry::Occupied(e) => alternates.entry(e.key().clone()).or_default().push(phones),
                        Entry::Vacant(e) => {
                            e.insert(phones);
                        }
                    }
                }
            }
        }

        Ok(PronunciationLexicon {
            entries,
            alternates,
            source_path: source_path.into(),
        })
    }

    /// The CMU dictionary shipped with the crate, parsed once per process.
    pub fn bundled() -> &'static PronunciationLexicon {
        static LEXICON: OnceLock<PronunciationLexicon> = OnceLock::new();
        LEXICON.get_or_init(|| {
            PronunciationLexicon::parse(BUNDLED_DICTIONARY, "<bundled cmudict>").expect("bundled dictionary parses")
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn source_path(&self) -> &Path {
        &self.source_path
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(&word.to_uppercase())
    }

    /// Phonemes of the first listed pronunciation.
    pub fn phonemes(&self, word: &str) -> Option<Vec<&str>> {
        self.entries.get(&word.to_uppercase()).map(|p| p.split(' ').collect())
    }

    /// Alternate pronunciations (`WORD(n)` lines), in file order.
    pub fn alternates(&self, word: &str) -> Vec<Vec<&str>> {
        self.alternates
            .get(&word.to_uppercase())
            .map(|alts| alts.iter().map(|p| p.split(' ').collect()).collect())
            .unwrap_or_default()
    }

    /// Stress marks of the vowel phonemes of `word`, if present.
    pub fn lookup_stress(&self, word: &str) -> Option<StressPattern> {
        let phones = self.entries.get(&word.to_uppercase())?;
        let marks = phones
            .split(' ')
            .filter_map(|ph| ph.bytes().last())
            .filter(u8::is_ascii_digit)
            .filter_map(|d| StressMark::from_digit(d - b'0'))
            .collect();
        Some(StressPattern { marks })
    }
}

fn is_valid_phoneme(ph: &str) -> bool {
    let (body, digit) = match ph.as_bytes().last() {
        Some(b) if b.is_ascii_digit() => (&ph[..ph.len() - 1], Some(*b)),
        _ => (ph, None),
    };
    !body.is_empty() && body.bytes().all(|b| b.is_ascii_uppercase()) && digit.is_none_or(|d| (b'0'..=b'2').contains(&d))
}

/// `WORD(2)` → `Some("WORD")`.
fn split_variant(word: &str) -> Option<&str> {
    let open = word.rfind('(')?;
    let inner = word[open + 1..].strip_suffix(')')?;
    if open > 0 && !inner.is_empty() && inner.bytes().all(|b| b.is_ascii_digit()) {
        Some(&word[..open])
    } else {
        None
    }
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<PronunciationLexicon> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    PronunciationLexicon::parse(&text, path)
}

/// Stress pattern for one word.
///
/// With `fallback` enabled, words missing from the lexicon get the
/// vowel-group heuristic of [`fallback_syllabify`].
pub fn stress_pattern(lexicon: &PronunciationLexicon, word: &str, fallback: bool) -> Result<StressPattern> {
    let word = word.trim();
    if word.is_empty() {
        return Err(Error::argument("empty word"));
    }
    match lexicon.lookup_stress(word) {
        Some(p) => Ok(p),
        None if fallback => Ok(fallback_syllabify(word)),
        None => Err(Error::NotFound(word.to_string())),
    }
}

/// Out-of-vocabulary heuristic: one syllable per maximal run of vowel
/// letters (at least one), primary stress on the first.
pub fn fallback_syllabify(word: &str) -> StressPattern {
    let mut groups = 0usize;
    let mut in_vowel = false;
    for c in word.chars() {
        let v = matches!(c.to_ascii_lowercase(), 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
        if v && !in_vowel {
            groups += 1;
        }
        in_vowel = v;
    }
    let n = groups.max(1);
    let mut marks = vec![StressMark::Unstressed; n];
    marks[0] = StressMark::Primary;
    StressPattern { marks }
}

const DEFAULT_STOPWORDS: &[&str] = &[
    "i",
    "me",
    "my",
    "myself",
    "we",
    "our",
    "ours",
    "ourselves",
    "you",
    "you're",
    "you've",
    "you'll",
    "you'd",
    "your",
    "yours",
    "yourself",
    "yourselves",
    "he",
    "him",
    "his",
    "himself",
    "she",
    "she's",
    "her",
    "hers",
    "herself",
    "it",
    "it's",
    "its",
    "itself",
    "they",
    "them",
    "their",
    "theirs",
    "themselves",
    "what",
    "which",
    "who",
    "whom",
    "this",
    "that",
    "that'll",
    "these",
    "those",
    "am",
    "is",
    "are",
    "was",
    "were",
    "be",
    "been",
    "being",
    "have",
    "has",
    "had",
    "having",
    "do",
    "does",
    "did",
    "doing",
    "a",
    "an",
    "the",
    "and",
    "but",
    "if",
    "or",
    "because",
    "as",
    "until",
    "while",
    "of",
    "at",
    "by",
    "for",
    "with",
    "about",
    "against",
    "between",
    "into",
    "through",
    "during",
    "before",
    "after",
    "above",
    "below",
    "to",
    "from",
    "in",
    "on",
    "further",
    "then",
    "once",
    "here",
    "there",
    "when",
    "where",
    "why",
    "how",
    "all",
    "any",
    "both",
    "each",
    "few",
    "more",
    "most",
    "other",
    "some",
    "such",
    "no",
    "nor",
    "not",
    "only",
    "own",
    "same",
    "so",
    "than",
    "too",
    "very",
    "s",
    "t",
    "can",
    "will",
    "just",
    "don",
    "don't",
    "should",
    "should've",
    "now",
    "d",
    "ll",
    "m",
    "o",
    "re",
    "ve",
    "y",
    "ain",
    "aren",
    "aren't",
    "couldn",
    "couldn't",
    "didn",
    "didn't",
    "doesn",
    "doesn't",
    "hadn",
    "hadn't",
    "hasn",
    "hasn't",
    "haven",
    "haven't",
    "isn",
    "isn't",
    "ma",
    "mightn",
    "mightn't",
    "mustn",
    "mustn't",
    "needn",
    "needn't",
    "shan",
    "shan't",
    "shouldn",
    "shouldn't",
    "wasn",
    "wasn't",
    "weren",
    "weren't",
    "won",
    "won't",
    "wouldn",
    "wouldn't",
    "like",
];

const DEFAULT_RETAINED_PRONOUNS: &[&str] = &["i", "we", "you", "he", "she", "they", "me", "us", "them"];

const DEFAULT_REMNANTS: &[&str] = &["ve", "ll", "re", "d", "s", "t", "m", "em"];

/// Customized stopword list. Personal pronouns listed in
/// `retained_pronouns` stay keywords even when the base list names them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopwordPolicy {
    pub base_list: BTreeSet<String>,
    pub retained_pronouns: BTreeSet<String>,
}

impl Default for StopwordPolicy {
    fn default() -> Self {
        StopwordPolicy {
            base_list: DEFAULT_STOPWORDS.iter().map(|s| s.to_string()).collect(),
            retained_pronouns: DEFAULT_RETAINED_PRONOUNS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl StopwordPolicy {
    pub fn new<I, J, S, T>(base: I, retained: J) -> Self
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        StopwordPolicy {
            base_list: base.into_iter().map(|s| normalize_word(s.as_ref())).collect(),
            retained_pronouns: retained.into_iter().map(|s| normalize_word(s.as_ref())).collect(),
        }
    }

    /// Default policy with the base list and/or retained pronouns replaced
    /// by the contents of word-list files.
    pub fn from_files(stopwords: Option<&Path>, retained: Option<&Path>) -> Result<Self> {
        let mut policy = StopwordPolicy::default();
        if let Some(p) = stopwords {
            policy.base_list = read_word_list(p)?.into_iter().collect();
        }
        if let Some(p) = retained {
            policy.retained_pronouns = read_word_list(p)?.into_iter().collect();
        }
        Ok(policy)
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        let w = normalize_word(word);
        self.base_list.contains(&w) && !self.retained_pronouns.contains(&w)
    }

    /// Base list minus retained pronouns.
    pub fn effective(&self) -> BTreeSet<&str> {
        self.base_list
            .difference(&self.retained_pronouns)
            .map(String::as_str)
            .collect()
    }
}

pub fn is_stopword(word: &str, policy: &StopwordPolicy) -> bool {
    policy.is_stopword(word)
}

/// Fragments left over after splitting a contraction at its apostrophe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemnantList {
    remnants: BTreeSet<String>,
}

impl Default for RemnantList {
    fn default() -> Self {
        RemnantList {
            remnants: DEFAULT_REMNANTS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl RemnantList {
    pub fn new<I, S>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut remnants = BTreeSet::new();
        for item in items {
            let r = item.as_ref().trim();
            if r.is_empty() || r.contains('\'') || r.chars().any(char::is_uppercase) {
                return Err(Error::argument(format!(
                    "remnant `{r}` must be a nonempty lowercase fragment without apostrophes"
                )));
            }
            remnants.insert(r.to_string());
        }
        Ok(RemnantList { remnants })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        RemnantList::new(read_word_list(path)?)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.remnants.contains(token)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.remnants.iter().map(String::as_str)
    }
}

pub fn strip_contraction_remnants(tokens: &[String], remnants: &RemnantList) -> Vec<String> {
    tokens.iter().filter(|t| !remnants.contains(t)).cloned().collect()
}

/// Lowercase and fold typographic apostrophes to ASCII.
pub fn normalize_word(word: &str) -> String {
    word.trim()
        .chars()
        .map(|c| match c {
            '\u{2019}' | '\u{2018}' | '`' => '\'',
            c => c,
        })
        .flat_map(char::to_lowercase)
        .collect()
}

/// One word per line, UTF-8. Blank lines and `#` comments are ignored.
pub fn read_word_list(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(normalize_word)
        .collect())
}
