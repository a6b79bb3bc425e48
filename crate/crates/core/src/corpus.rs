//! Line-delimited JSON corpora: one `{id, title, lyrics, time_signature}`
//! object per line.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::TimeSignature;
use crate::patterning::LyricsText;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub title: String,
    pub lyrics: String,
    pub time_signature: TimeSignature,
}

impl CorpusRecord {
    pub fn lyrics_text(&self) -> LyricsText {
        LyricsText::new(self.id.clone(), self.lyrics.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    /// 1-based line number in the corpus file.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub records: Vec<CorpusRecord>,
    pub rejections: Vec<Rejection>,
}

/// Minority share below which a corpus is reported as imbalanced.
pub const IMBALANCE_SHARE: f64 = 1.0 / 3.0;

impl Corpus {
    /// Blank lines are ignored; every other line must hold a valid record
    /// with a nonempty lyrics field and an id not seen before.
    pub fn parse(text: &str) -> Corpus {
        let mut corpus = Corpus::default();
        let mut seen = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let reject = |reason: String| Rejection { line: i + 1, reason };
            match serde_json::from_str::<CorpusRecord>(line) {
                Err(e) => corpus.rejections.push(reject(e.to_string())),
                Ok(r) if r.lyrics.trim().is_empty() => corpus.rejections.push(reject("empty lyrics".into())),
                Ok(r) if !seen.insert(r.id.clone()) => {
                    corpus.rejections.push(reject(format!("duplicate id `{}`", r.id)))
                }
                Ok(r) => corpus.records.push(r),
            }
        }
        corpus
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Corpus> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Corpus::parse(&text))
    }

    /// Like [`Corpus::read`], but any rejected line is an error.
    pub fn read_strict(path: impl AsRef<Path>) -> Result<Vec<CorpusRecord>> {
        let c = Corpus::read(path)?;
        if let Some(r) = c.rejections.first() {
            return Err(Error::Parse {
                line: r.line,
                message: r.reason.clone(),
            });
        }
        if c.records.is_empty() {
            return Err(Error::argument("corpus has no records"));
        }
        Ok(c.records)
    }

    pub fn class_counts(&self) -> BTreeMap<TimeSignature, usize> {
        class_counts(&self.records)
    }
}

pub fn class_counts(records: &[CorpusRecord]) -> BTreeMap<TimeSignature, usize> {
    let mut m: BTreeMap<TimeSignature, usize> = TimeSignature::ALL.iter().map(|c| (*c, 0)).collect();
    for r in records {
        *m.entry(r.time_signature).or_default() += 1;
    }
    m
}

pub fn write_corpus<W: io::Write>(records: &[CorpusRecord], mut w: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(|e| Error::format(e.to_string()))?;
    }
    Ok(())
}

pub fn labeled_lyrics(records: &[CorpusRecord]) -> Vec<(LyricsText, TimeSignature)> {
    records.iter().map(|r| (r.lyrics_text(), r.time_signature)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = concat!(
        r#"{"id":"a","title":"A","lyrics":"la la","time_signature":"3/4"}"#,
        "\n",
        r#"{"id":"b","title":"B","lyrics":"hey\nho","time_signature":"4/4"}"#,
        "\n"
    );

    #[test]
    fn counts_valid_records() {
        let c = Corpus::parse(TWO);
        assert!(c.rejections.is_empty());
        assert_eq!(c.class_counts()[&TimeSignature::ThreeFour], 1);
        assert_eq!(c.class_counts()[&TimeSignature::FourFour], 1);
    }

    #[test]
    fn rejects_with_line_numbers() {
        let text = format!(
            "{TWO}\n{}\n{}\n{}\n",
            r#"{"id":"c","title":"C","time_signature":"4/4"}"#,
            r#"{"id":"d","title":"D","lyrics":"x","time_signature":"6/8"}"#,
            r#"{"id":"a","title":"A","lyrics":"dup","time_signature":"3/4"}"#
        );
        let c = Corpus::parse(&text);
        assert_eq!(c.records.len(), 2);
        let lines: Vec<usize> = c.rejections.iter().map(|r| r.line).collect();
        assert_eq!(lines, vec![4, 5, 6]);
        assert!(c.rejections[0].reason.contains("lyrics"));
    }

    #[test]
    fn write_then_parse() {
        let c = Corpus::parse(TWO);
        let mut buf = Vec::new();
        write_corpus(&c.records, &mut buf).unwrap();
        assert_eq!(Corpus::parse(std::str::from_utf8(&buf).unwrap()).records, c.records);
    }
}
