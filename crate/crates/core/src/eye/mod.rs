//! Eye-tracking fixation reports and the reading-ease measures derived
//! from them.

mod ease;
mod measures;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Level};
use crate::error::{Error, Result};

pub use ease::{average_over_participants, EaseKey, EaseTable, ReadingEaseValue, TrialFilter};
pub use measures::{
    segment_passes, span_measures, trial_measures, word_stats, Measure, MeasureValues, Pass, WordStats,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Ordinary,
    InfoSeeking,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Ordinary => "ordinary",
            Regime::InfoSeeking => "info_seeking",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "ordinary" | "ordinary_reading" => Ok(Regime::Ordinary),
            "info_seeking" | "information_seeking" | "hunting" => Ok(Regime::InfoSeeking),
            other => Err(Error::Config(format!("unknown reading regime `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Group {
    L1,
    L2,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::L1 => "L1",
            Group::L2 => "L2",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "L1" => Ok(Group::L1),
            "L2" => Ok(Group::L2),
            other => Err(Error::Config(format!("unknown participant group `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixationEvent {
    pub participant_id: String,
    pub unit_id: String,
    pub word_index: usize,
    pub order: usize,
    pub duration: f64,
}

/// One fixation inside a [`Trial`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fixation {
    pub word: usize,
    pub duration: f64,
}

/// One participant's reading of one unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub participant_id: String,
    pub unit_id: String,
    pub level: Level,
    pub regime: Regime,
    pub group: Group,
    pub n_words: usize,
    /// Fixations in temporal order; empty when the unit was skipped.
    pub fixations: Vec<Fixation>,
    pub total_time: f64,
}

impl Trial {
    /// Builds a trial, checking word indices and durations.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        participant_id: &str,
        unit_id: &str,
        level: Level,
        regime: Regime,
        group: Group,
        n_words: usize,
        fixations: Vec<Fixation>,
        total_time: f64,
    ) -> Result<Trial> {
        let invalid = |message: String| Error::InvalidTrial {
            participant: participant_id.to_string(),
            unit_id: unit_id.to_string(),
            message,
        };
        if n_words == 0 {
            return Err(invalid("unit has no words".into()));
        }
        for (i, f) in fixations.iter().enumerate() {
            if f.word >= n_words {
                return Err(invalid(format!(
                    "fixation {i}: word_index {} out of range for {n_words} words",
                    f.word
                )));
            }
            if !(f.duration > 0.0 && f.duration.is_finite()) {
                return Err(invalid(format!(
                    "fixation {i}: duration {} must be > 0",
                    f.duration
                )));
            }
        }
        if !(total_time >= 0.0 && total_time.is_finite()) {
            return Err(invalid(format!("total time {total_time} must be >= 0")));
        }
        Ok(Trial {
            participant_id: participant_id.to_string(),
            unit_id: unit_id.to_string(),
            level,
            regime,
            group,
            n_words,
            fixations,
            total_time,
        })
    }

    pub fn events(&self) -> impl Iterator<Item = FixationEvent> + '_ {
        self.fixations.iter().enumerate().map(|(order, f)| FixationEvent {
            participant_id: self.participant_id.clone(),
            unit_id: self.unit_id.clone(),
            word_index: f.word,
            order,
            duration: f.duration,
        })
    }
}

#[derive(Debug, Deserialize)]
struct FixationRow {
    participant_id: String,
    unit_id: String,
    level: String,
    regime: String,
    group: String,
    order: Option<String>,
    word_index: Option<String>,
    duration_ms: Option<String>,
    total_time_ms: String,
}

struct Pending {
    level: Level,
    regime: Regime,
    group: Group,
    total_time: f64,
    fixations: Vec<Fixation>,
    skipped: bool,
    first_line: usize,
}

/// Reads a fixation report CSV into trials, in first-appearance order.
///
/// A row whose `order`, `word_index` and `duration_ms` are all empty marks a
/// trial in which the unit was skipped entirely.
pub fn ingest_fixations(path: impl AsRef<Path>, corpus: &Corpus) -> Result<Vec<Trial>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut keys: Vec<(String, String)> = Vec::new();
    let mut pending: BTreeMap<(String, String), Pending> = BTreeMap::new();

    for (i, row) in reader.deserialize::<FixationRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| csv_error(path, e))?;
        let bad = |msg: String| Error::parse(path, line, msg);
        let unit = corpus.require_unit(&row.unit_id)?;
        let level: Level = row.level.parse().map_err(|e: Error| bad(e.to_string()))?;
        if level != unit.level {
            return Err(bad(format!(
                "level `{level}` does not match unit `{}` ({})",
                unit.unit_id, unit.level
            )));
        }
        let regime: Regime = row.regime.parse().map_err(|e: Error| bad(e.to_string()))?;
        let group: Group = row.group.parse().map_err(|e: Error| bad(e.to_string()))?;
        let total_time: f64 = row
            .total_time_ms
            .parse()
            .map_err(|_| bad(format!("bad total_time_ms `{}`", row.total_time_ms)))?;

        let key = (row.participant_id.clone(), row.unit_id.clone());
        let entry = match pending.get_mut(&key) {
            Some(p) => {
                if (p.level, p.regime, p.group) != (level, regime, group) || p.total_time != total_time {
                    return Err(bad(format!(
                        "trial {}/{} metadata differs from line {}",
                        key.0, key.1, p.first_line
                    )));
                }
                p
            }
            None => {
                keys.push(key.clone());
                pending.entry(key.clone()).or_insert(Pending {
                    level,
                    regime,
                    group,
                    total_time,
                    fixations: Vec::new(),
                    skipped: false,
                    first_line: line,
                })
            }
        };

        let blank = |v: &Option<String>| v.as_deref().is_none_or(str::is_empty);
        if blank(&row.order) && blank(&row.word_index) && blank(&row.duration_ms) {
            if !entry.fixations.is_empty() {
                return Err(bad("skip marker inside a trial with fixations".into()));
            }
            entry.skipped = true;
            continue;
        }
        if entry.skipped {
            return Err(bad("fixation after a skip marker".into()));
        }
        let field = |name: &str, v: &Option<String>| -> Result<String> {
            v.clone()
                .filter(|s| !s.is_empty())
                .ok_or_else(|| Error::parse(path, line, format!("missing `{name}`")))
        };
        let order: usize = field("order", &row.order)?
            .parse()
            .map_err(|_| bad("bad `order`".into()))?;
        if order != entry.fixations.len() {
            return Err(bad(format!(
                "fixation order {order} in trial {}/{}: expected {} (orders must be dense and increasing)",
                key.0,
                key.1,
                entry.fixations.len()
            )));
        }
        let word: usize = field("word_index", &row.word_index)?
            .parse()
            .map_err(|_| bad("bad `word_index`".into()))?;
        if word >= unit.word_count() {
            return Err(bad(format!(
                "word_index {word} out of range: unit `{}` has {} words",
                unit.unit_id,
                unit.word_count()
            )));
        }
        let duration: f64 = field("duration_ms", &row.duration_ms)?
            .parse()
            .map_err(|_| bad("bad `duration_ms`".into()))?;
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(bad(format!("duration {duration} must be > 0")));
        }
        entry.fixations.push(Fixation { word, duration });
    }

    keys.into_iter()
        .map(|key| {
            let p = pending.remove(&key).expect("key recorded");
            let n_words = corpus.require_unit(&key.1)?.word_count();
            Trial::new(
                &key.0,
                &key.1,
                p.level,
                p.regime,
                p.group,
                n_words,
                p.fixations,
                p.total_time,
            )
        })
        .collect()
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        kind => Error::parse(path, line, format!("{kind:?}")),
    }
}
