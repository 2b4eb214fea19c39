//! Per-word psycholinguistic measures and per-unit score files.
//!
//! Word length and unigram frequency are computed here. Surprisal, entropy,
//! PLL and embedding depth come from an external word-measures TSV keyed by
//! `(unit_id, word_index)`, where `word_index` counts word tokens only.
//! Several TSV files can be loaded side by side under different set names,
//! e.g. one per language model.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::tokenize::strip_punct;
use crate::corpus::{Corpus, Granularity, TextUnit, Token};
use crate::error::{Error, Result};

pub const DEFAULT_SET: &str = "default";
pub const DEFAULT_OOV_FLOOR: f64 = 1e-9;

pub fn word_length(token: &Token) -> Result<usize> {
    if !token.is_word {
        return Err(Error::NoLetters(token.surface.clone()));
    }
    Ok(token.letters)
}

#[derive(Debug, Clone)]
pub struct FrequencyTable {
    probs: HashMap<String, f64>,
    floor: f64,
}

impl FrequencyTable {
    pub fn new(probs: HashMap<String, f64>, floor: f64) -> Result<Self> {
        if !(floor > 0.0 && floor <= 1.0) {
            return Err(Error::Config(format!("OOV floor must be in (0, 1], got {floor}")));
        }
        if let Some((w, p)) = probs.iter().find(|(_, &p)| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::InvalidInput(format!(
                "frequency of `{w}` is {p}, outside (0, 1]"
            )));
        }
        Ok(FrequencyTable { probs, floor })
    }

    /// Reads a `word<TAB>probability` file. A header row is allowed.
    pub fn load(path: impl AsRef<Path>, floor: f64) -> Result<Self> {
        let path = path.as_ref();
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut probs = HashMap::new();
        for (i, line) in raw.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(word), Some(p)) = (fields.next(), fields.next()) else {
                return Err(Error::parse(path, i + 1, "expected `word<TAB>probability`"));
            };
            let p: f64 = match p.trim().parse() {
                Ok(p) => p,
                Err(_) if i == 0 => continue,
                Err(_) => return Err(Error::parse(path, i + 1, format!("bad probability `{p}`"))),
            };
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::parse(
                    path,
                    i + 1,
                    format!("probability {p} outside (0, 1]"),
                ));
            }
            probs.insert(word.trim().to_lowercase(), p);
        }
        FrequencyTable::new(probs, floor)
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Probability of a word; out-of-vocabulary words get the floor.
    pub fn probability(&self, word: &str) -> f64 {
        self.probs
            .get(&strip_punct(word).to_lowercase())
            .copied()
            .unwrap_or(self.floor)
    }
}

/// Unigram surprisal in bits, `-log2 p(w)`.
pub fn frequency_surprisal(token: &Token, table: &FrequencyTable) -> f64 {
    -table.probability(&token.surface).log2()
}

/// Optional columns of the word-measures file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Column {
    #[serde(rename = "surprisal_bits")]
    Surprisal,
    #[serde(rename = "entropy_bits")]
    Entropy,
    #[serde(rename = "pll")]
    Pll,
    #[serde(rename = "embedding_depth")]
    EmbeddingDepth,
}

impl Column {
    pub const ALL: [Column; 4] = [
        Column::Surprisal,
        Column::Entropy,
        Column::Pll,
        Column::EmbeddingDepth,
    ];

    pub fn header(self) -> &'static str {
        match self {
            Column::Surprisal => "surprisal_bits",
            Column::Entropy => "entropy_bits",
            Column::Pll => "pll",
            Column::EmbeddingDepth => "embedding_depth",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.header())
    }
}

impl FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "surprisal_bits" | "surprisal" => Ok(Column::Surprisal),
            "entropy_bits" | "entropy" => Ok(Column::Entropy),
            "pll" => Ok(Column::Pll),
            "embedding_depth" => Ok(Column::EmbeddingDepth),
            other => Err(Error::UnknownMeasure(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordMeasureRow {
    pub unit_id: String,
    pub word_index: usize,
    pub surface: String,
    pub surprisal: Option<f64>,
    pub entropy: Option<f64>,
    pub pll: Option<f64>,
    pub embedding_depth: Option<f64>,
}

impl WordMeasureRow {
    pub fn get(&self, column: Column) -> Option<f64> {
        match column {
            Column::Surprisal => self.surprisal,
            Column::Entropy => self.entropy,
            Column::Pll => self.pll,
            Column::EmbeddingDepth => self.embedding_depth,
        }
    }

    fn values(&self) -> [Option<f64>; 4] {
        Column::ALL.map(|c| self.get(c))
    }
}

fn parse_cell(path: &Path, line: usize, column: &str, raw: &str) -> Result<Option<f64>> {
    let raw = raw.trim();
    if raw.is_empty() || raw.eq_ignore_ascii_case("na") || raw.eq_ignore_ascii_case("nan") {
        return Ok(None);
    }
    let v: f64 = raw
        .parse()
        .map_err(|_| Error::parse(path, line, format!("`{column}`: not a number: `{raw}`")))?;
    if !v.is_finite() {
        return Err(Error::parse(path, line, format!("`{column}`: non-finite value")));
    }
    Ok(Some(v))
}

/// Parses a word-measures TSV without checking it against a corpus.
pub fn read_word_measures(path: impl AsRef<Path>) -> Result<Vec<WordMeasureRow>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .flexible(false)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let required =
        |name: &str| find(name).ok_or_else(|| Error::parse(path, 1, format!("missing column `{name}`")));
    let unit_col = required("unit_id")?;
    let index_col = required("word_index")?;
    let surface_col = find("surface");
    let value_cols = Column::ALL.map(|c| find(c.header()));

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| csv_error(path, e))?;
        let field = |c: usize| record.get(c).unwrap_or("");
        let word_index: usize = field(index_col)
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, line, format!("bad word_index `{}`", field(index_col))))?;
        let mut values = [None; 4];
        for (slot, (col, column)) in values.iter_mut().zip(value_cols.iter().zip(Column::ALL)) {
            if let Some(c) = col {
                *slot = parse_cell(path, line, column.header(), field(*c))?;
            }
        }
        if let Some(v) = values[Column::Surprisal.index()] {
            if v < 0.0 {
                return Err(Error::parse(path, line, format!("negative surprisal {v}")));
            }
        }
        rows.push(WordMeasureRow {
            unit_id: field(unit_col).trim().to_string(),
            word_index,
            surface: surface_col.map(field).unwrap_or("").to_string(),
            surprisal: values[0],
            entropy: values[1],
            pll: values[2],
            embedding_depth: values[3],
        });
    }
    Ok(rows)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        kind => Error::parse(path, line, format!("{kind:?}")),
    }
}

type WordValues = Vec<[Option<f64>; 4]>;

/// Collects word-measure files, then seals into an immutable [`MeasureStore`].
pub struct MeasureStoreBuilder<'c> {
    corpus: &'c Corpus,
    sets: BTreeMap<String, BTreeMap<String, WordValues>>,
    frequency: Option<FrequencyTable>,
}

impl<'c> MeasureStoreBuilder<'c> {
    pub fn new(corpus: &'c Corpus) -> Self {
        MeasureStoreBuilder {
            corpus,
            sets: BTreeMap::new(),
            frequency: None,
        }
    }

    pub fn frequency(mut self, table: FrequencyTable) -> Self {
        self.frequency = Some(table);
        self
    }

    /// Loads a TSV into the named set. Returns the number of rows merged.
    pub fn ingest_word_measures(&mut self, set: &str, path: impl AsRef<Path>) -> Result<usize> {
        let rows = read_word_measures(path)?;
        let n = rows.len();
        self.add_rows(set, rows)?;
        Ok(n)
    }

    /// Validates rows against the corpus and merges them into `set`.
    ///
    /// Every unit present must have exactly one row per word token. A cell
    /// already filled by an earlier file must not change value.
    pub fn add_rows(&mut self, set: &str, rows: Vec<WordMeasureRow>) -> Result<()> {
        let mut by_unit: BTreeMap<String, Vec<WordMeasureRow>> = BTreeMap::new();
        for row in rows {
            by_unit.entry(row.unit_id.clone()).or_default().push(row);
        }
        let mut checked = Vec::with_capacity(by_unit.len());
        for (unit_id, rows) in by_unit {
            let unit = self.corpus.require_unit(&unit_id)?;
            let expected = unit.word_count();
            if rows.len() != expected {
                return Err(Error::WordCountMismatch {
                    unit_id,
                    expected,
                    found: rows.len(),
                });
            }
            let mut values: Vec<Option<[Option<f64>; 4]>> = vec![None; expected];
            for row in &rows {
                if row.word_index >= expected {
                    return Err(Error::WordCountMismatch {
                        unit_id: unit_id.clone(),
                        expected,
                        found: row.word_index + 1,
                    });
                }
                if values[row.word_index].replace(row.values()).is_some() {
                    return Err(Error::InvalidInput(format!(
                        "unit `{unit_id}`: duplicate word_index {}",
                        row.word_index
                    )));
                }
            }
            let values: WordValues = values.into_iter().map(|v| v.expect("dense")).collect();
            checked.push((unit_id, values));
        }

        let store = self.sets.entry(set.to_string()).or_default();
        for (unit_id, values) in checked {
            match store.get_mut(&unit_id) {
                None => {
                    store.insert(unit_id, values);
                }
                Some(existing) => {
                    for (i, (old, new)) in existing.iter_mut().zip(values).enumerate() {
                        for (c, (o, n)) in old.iter_mut().zip(new).enumerate() {
                            match (*o, n) {
                                (Some(a), Some(b)) if a != b => {
                                    return Err(Error::InvalidInput(format!(
                                        "unit `{unit_id}` word {i}: conflicting `{}` values {a} and {b}",
                                        Column::ALL[c]
                                    )));
                                }
                                (None, Some(b)) => *o = Some(b),
                                _ => {}
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn seal(self) -> MeasureStore {
        MeasureStore {
            sets: self.sets,
            frequency: self.frequency,
        }
    }
}

/// Where per-word values for a measure come from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WordSource {
    Length,
    Frequency,
    Column { set: String, column: Column },
}

impl fmt::Display for WordSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordSource::Length => f.write_str("word_length"),
            WordSource::Frequency => f.write_str("word_frequency"),
            WordSource::Column { set, column } if set == DEFAULT_SET => write!(f, "{column}"),
            WordSource::Column { set, column } => write!(f, "{set}:{column}"),
        }
    }
}

/// One missing per-word value found by [`MeasureStore::audit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditGap {
    pub unit_id: String,
    pub measure: String,
    pub missing_indices: Vec<usize>,
}

/// Immutable per-word measure store.
#[derive(Debug, Clone, Default)]
pub struct MeasureStore {
    sets: BTreeMap<String, BTreeMap<String, WordValues>>,
    frequency: Option<FrequencyTable>,
}

impl MeasureStore {
    pub fn frequency_table(&self) -> Option<&FrequencyTable> {
        self.frequency.as_ref()
    }

    pub fn sets(&self) -> impl Iterator<Item = &str> {
        self.sets.keys().map(String::as_str)
    }

    /// True when any word of any unit in `set` has a value for `column`.
    pub fn has_column(&self, set: &str, column: Column) -> bool {
        self.sets.get(set).is_some_and(|units| {
            units
                .values()
                .any(|v| v.iter().any(|w| w[column.index()].is_some()))
        })
    }

    /// Per-word values of `unit`, in word order, with `None` for gaps.
    ///
    /// Rows are looked up for the unit itself, then sliced out of its parent
    /// passage, and for passages concatenated from their sentences.
    pub fn word_values(
        &self,
        corpus: &Corpus,
        source: &WordSource,
        unit: &TextUnit,
    ) -> Result<Vec<Option<f64>>> {
        match source {
            WordSource::Length => Ok(unit.words().map(|t| Some(t.letters as f64)).collect()),
            WordSource::Frequency => {
                let table = self
                    .frequency
                    .as_ref()
                    .ok_or_else(|| Error::Config("word_frequency needs a frequency table".into()))?;
                Ok(unit
                    .words()
                    .map(|t| Some(frequency_surprisal(t, table)))
                    .collect())
            }
            WordSource::Column { set, column } => {
                let units = self.sets.get(set);
                let lookup = |id: &str| units.and_then(|u| u.get(id));
                let pick = |v: &[Option<f64>; 4]| v[column.index()];
                if let Some(rows) = lookup(&unit.unit_id) {
                    return Ok(rows.iter().map(pick).collect());
                }
                if let Some(rows) = unit.parent.as_deref().and_then(lookup) {
                    return Ok(unit.passage_word_indices().map(|i| pick(&rows[i])).collect());
                }
                let mut out = vec![None; unit.word_count()];
                if unit.granularity == Granularity::Passage {
                    for sentence in corpus.sentences(unit.level) {
                        if sentence.parent.as_deref() != Some(unit.unit_id.as_str()) {
                            continue;
                        }
                        if let Some(rows) = lookup(&sentence.unit_id) {
                            for (i, v) in sentence.passage_word_indices().zip(rows) {
                                out[i] = pick(v);
                            }
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// Mean of the per-word values of `unit`; any gap is an error.
    pub fn aggregate(&self, corpus: &Corpus, source: &WordSource, unit: &TextUnit) -> Result<f64> {
        let values = self.word_values(corpus, source, unit)?;
        if values.is_empty() {
            return Err(Error::EmptyUnit(unit.unit_id.clone()));
        }
        let missing: Vec<usize> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_none())
            .map(|(i, _)| i)
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingWordValues {
                unit_id: unit.unit_id.clone(),
                measure: source.to_string(),
                indices: missing,
            });
        }
        let sum: f64 = values.iter().map(|v| v.unwrap()).sum();
        Ok(sum / values.len() as f64)
    }

    pub fn aggregate_unit(
        &self,
        corpus: &Corpus,
        source: &WordSource,
        method: &str,
        unit: &TextUnit,
    ) -> Result<UnitScore> {
        Ok(UnitScore {
            unit_id: unit.unit_id.clone(),
            method: method.to_string(),
            value: self.aggregate(corpus, source, unit)?,
        })
    }

    /// Lists every unit and measure with missing per-word values.
    pub fn audit<'u>(
        &self,
        corpus: &Corpus,
        units: impl IntoIterator<Item = &'u TextUnit>,
        sources: &[WordSource],
    ) -> Result<Vec<AuditGap>> {
        let mut gaps = Vec::new();
        for unit in units {
            for source in sources {
                let values = self.word_values(corpus, source, unit)?;
                let missing: Vec<usize> = values
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.is_none())
                    .map(|(i, _)| i)
                    .collect();
                if !missing.is_empty() {
                    gaps.push(AuditGap {
                        unit_id: unit.unit_id.clone(),
                        measure: source.to_string(),
                        missing_indices: missing,
                    });
                }
            }
        }
        Ok(gaps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitScore {
    pub unit_id: String,
    pub method: String,
    pub value: f64,
}

/// Reads a `unit_id,value` CSV of externally produced scores.
pub fn ingest_unit_scores(path: impl AsRef<Path>, method: &str) -> Result<Vec<UnitScore>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let unit_col = headers.iter().position(|h| h == "unit_id");
    let value_col = headers.iter().position(|h| h == "value");
    let (Some(unit_col), Some(value_col)) = (unit_col, value_col) else {
        return Err(Error::parse(path, 1, "expected header `unit_id,value`"));
    };
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| csv_error(path, e))?;
        let unit_id = record.get(unit_col).unwrap_or("").to_string();
        let raw = record.get(value_col).unwrap_or("");
        let value: f64 = raw
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::parse(path, line, format!("non-numeric value `{raw}`")))?;
        if !seen.insert(unit_id.clone()) {
            return Err(Error::DuplicateScore(unit_id));
        }
        out.push(UnitScore {
            unit_id,
            method: method.to_string(),
            value,
        });
    }
    Ok(out)
}

/// Reads an annotation export (`unit_id,model_id,variant,value`) and keeps
/// rows matching `model_id` and `variant`. Rows with an empty value are parse
/// failures and are skipped with a logged count.
pub fn ingest_annotations(
    path: impl AsRef<Path>,
    model_id: &str,
    variant: &str,
    method: &str,
) -> Result<Vec<UnitScore>> {
    #[derive(Deserialize)]
    struct Row {
        unit_id: String,
        model_id: String,
        variant: String,
        value: Option<String>,
    }
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut skipped = 0usize;
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| csv_error(path, e))?;
        if row.model_id != model_id || row.variant != variant {
            continue;
        }
        let Some(raw) = row.value.filter(|v| !v.is_empty()) else {
            skipped += 1;
            continue;
        };
        let value: f64 = raw
            .parse()
            .map_err(|_| Error::parse(path, i + 2, format!("non-numeric value `{raw}`")))?;
        if !seen.insert(row.unit_id.clone()) {
            return Err(Error::DuplicateScore(row.unit_id));
        }
        out.push(UnitScore {
            unit_id: row.unit_id,
            method: method.to_string(),
            value,
        });
    }
    if skipped > 0 {
        tracing::warn!(
            model_id,
            variant,
            skipped,
            "annotation rows without a value excluded"
        );
    }
    Ok(out)
}
