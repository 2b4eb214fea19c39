//! The six traditional readability formulas.
//!
//! All formulas are computed from raw counts over the word tokens of a unit
//! ([`TextCounts`]), so the same code serves passages and single sentences
//! (where `sentences == 1`).

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::tokenize::strip_punct;
use crate::corpus::TextUnit;
use crate::error::{Error, Result};

const BUILTIN_EASY_WORDS: &str = include_str!("../data/dale_chall_easy_words.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    FleschRe,
    DaleChall,
    GunningFog,
    Ari,
    ColemanLiau,
    FleschKincaid,
}

impl Formula {
    pub const ALL: [Formula; 6] = [
        Formula::FleschRe,
        Formula::DaleChall,
        Formula::GunningFog,
        Formula::Ari,
        Formula::ColemanLiau,
        Formula::FleschKincaid,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Formula::FleschRe => "flesch_re",
            Formula::DaleChall => "dale_chall",
            Formula::GunningFog => "gunning_fog",
            Formula::Ari => "ari",
            Formula::ColemanLiau => "coleman_liau",
            Formula::FleschKincaid => "flesch_kincaid",
        }
    }

    /// Evaluates the formula on precomputed counts.
    pub fn apply(self, c: &TextCounts) -> Result<f64> {
        if c.words == 0 || c.sentences == 0 {
            return Err(Error::EmptyUnit(self.id().to_string()));
        }
        let words = c.words as f64;
        let wps = words / c.sentences as f64;
        let spw = c.syllables as f64 / words;
        let value = match self {
            Formula::FleschRe => 206.836 - 84.6 * spw - 1.015 * wps,
            Formula::DaleChall => {
                let difficult = c.difficult_words.ok_or(Error::EmptyWordList)?;
                0.1579 * (difficult as f64 / words * 100.0) + 0.0496 * wps + 3.6365
            }
            Formula::GunningFog => 0.4 * (wps + 100.0 * c.complex_words as f64 / words),
            Formula::Ari => 4.71 * (c.letters as f64 / words) + 0.5 * wps - 21.43,
            Formula::ColemanLiau => {
                let l = c.letters as f64 / words * 100.0;
                let s = c.sentences as f64 / words * 100.0;
                0.0588 * l - 0.296 * s - 15.8
            }
            Formula::FleschKincaid => 0.39 * wps + 11.8 * spw - 15.59,
        };
        Ok(value)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Formula::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::UnknownMethod {
                id: s.to_string(),
                known: Formula::ALL.map(Formula::id).join(", "),
            })
    }
}

/// Case-insensitive set of Dale-Chall "easy" words.
#[derive(Debug, Clone)]
pub struct EasyWords(HashSet<String>);

impl EasyWords {
    /// The bundled list.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_EASY_WORDS).expect("bundled list is non-empty")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&raw)
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(raw: &str) -> Result<Self> {
        let set: HashSet<String> = raw
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        if set.is_empty() {
            return Err(Error::EmptyWordList);
        }
        Ok(EasyWords(set))
    }

    pub fn from_words<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let set: HashSet<String> = words.into_iter().map(|w| w.as_ref().to_lowercase()).collect();
        if set.is_empty() {
            return Err(Error::EmptyWordList);
        }
        Ok(EasyWords(set))
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.0.contains(&strip_punct(surface).to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Raw counts over the word tokens of a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TextCounts {
    pub words: usize,
    pub sentences: usize,
    pub syllables: usize,
    pub letters: usize,
    /// Words with three or more syllables.
    pub complex_words: usize,
    /// Words outside the easy-word list; `None` when no list was supplied.
    pub difficult_words: Option<usize>,
}

impl TextCounts {
    pub fn of(unit: &TextUnit, easy: Option<&EasyWords>) -> TextCounts {
        let mut c = TextCounts {
            sentences: unit.sentence_count,
            difficult_words: easy.map(|_| 0),
            ..TextCounts::default()
        };
        for t in unit.words() {
            c.words += 1;
            c.syllables += t.syllables;
            c.letters += t.letters;
            if t.syllables >= 3 {
                c.complex_words += 1;
            }
            if let (Some(list), Some(d)) = (easy, c.difficult_words.as_mut()) {
                if !list.contains(&t.surface) {
                    *d += 1;
                }
            }
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulaScore {
    pub method: Formula,
    pub value: f64,
    pub unit_id: String,
}

fn score(formula: Formula, unit: &TextUnit, easy: Option<&EasyWords>) -> Result<FormulaScore> {
    let value = formula.apply(&TextCounts::of(unit, easy))?;
    Ok(FormulaScore {
        method: formula,
        value,
        unit_id: unit.unit_id.clone(),
    })
}

pub fn flesch_reading_ease(unit: &TextUnit) -> Result<FormulaScore> {
    score(Formula::FleschRe, unit, None)
}

pub fn dale_chall(unit: &TextUnit, easy_words: &EasyWords) -> Result<FormulaScore> {
    if easy_words.is_empty() {
        return Err(Error::EmptyWordList);
    }
    score(Formula::DaleChall, unit, Some(easy_words))
}

pub fn gunning_fog(unit: &TextUnit) -> Result<FormulaScore> {
    score(Formula::GunningFog, unit, None)
}

pub fn ari(unit: &TextUnit) -> Result<FormulaScore> {
    score(Formula::Ari, unit, None)
}

pub fn coleman_liau(unit: &TextUnit) -> Result<FormulaScore> {
    score(Formula::ColemanLiau, unit, None)
}

pub fn flesch_kincaid(unit: &TextUnit) -> Result<FormulaScore> {
    score(Formula::FleschKincaid, unit, None)
}

/// Scores any of the six formulas; Dale-Chall needs `easy_words`.
pub fn score_unit(formula: Formula, unit: &TextUnit, easy_words: Option<&EasyWords>) -> Result<FormulaScore> {
    match formula {
        Formula::DaleChall => dale_chall(unit, easy_words.ok_or(Error::EmptyWordList)?),
        f => score(f, unit, None),
    }
}
