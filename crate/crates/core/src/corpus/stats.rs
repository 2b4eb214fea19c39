//! Descriptive statistics of the two corpus levels.

use serde::{Deserialize, Serialize};

use super::{Corpus, Level, TextUnit};
use crate::error::{Error, Result};
use crate::measures::{Column, MeasureStore, WordSource, DEFAULT_SET};
use crate::stats::{mean_ci, welch_ttest, MeanCi, TTest};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatRow {
    pub label: String,
    pub original: MeanCi,
    pub simplified: MeanCi,
    /// `None` when both levels have zero variance.
    pub test: Option<TTest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub passages_original: usize,
    pub passages_simplified: usize,
    pub rows: Vec<StatRow>,
}

fn row(label: &str, original: &[f64], simplified: &[f64]) -> Result<StatRow> {
    let test = match welch_ttest(original, simplified) {
        Ok(t) => Some(t),
        Err(Error::Degenerate(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(StatRow {
        label: label.to_string(),
        original: mean_ci(original, 0.95)?,
        simplified: mean_ci(simplified, 0.95)?,
        test,
    })
}

fn word_mean(unit: &TextUnit, f: impl Fn(&super::Token) -> f64) -> f64 {
    let n = unit.word_count();
    unit.words().map(f).sum::<f64>() / n as f64
}

/// Corpus statistics per level with Welch t-tests between levels.
///
/// Passage-level rows use one value per passage; sentence length uses one
/// value per sentence. Frequency and surprisal rows appear when the store
/// has a frequency table or a default-set surprisal column.
pub fn corpus_stats(corpus: &Corpus, store: Option<&MeasureStore>) -> Result<CorpusStats> {
    let passages: Vec<Vec<&TextUnit>> = Level::ALL.iter().map(|&l| corpus.passages(l).collect()).collect();
    for (level, p) in Level::ALL.iter().zip(&passages) {
        if p.is_empty() {
            return Err(Error::MissingLevel(format!("no {level} passages")));
        }
    }
    let per_passage = |f: &dyn Fn(&TextUnit) -> Result<f64>| -> Result<Vec<Vec<f64>>> {
        passages
            .iter()
            .map(|ps| ps.iter().map(|u| f(u)).collect())
            .collect()
    };

    let mut rows = Vec::new();
    let words = per_passage(&|u| Ok(u.word_count() as f64))?;
    rows.push(row("Words per passage", &words[0], &words[1])?);
    let sents = per_passage(&|u| Ok(u.sentence_count as f64))?;
    rows.push(row("Sentences per passage", &sents[0], &sents[1])?);
    let lengths: Vec<Vec<f64>> = Level::ALL
        .iter()
        .map(|&l| corpus.sentences(l).map(|s| s.word_count() as f64).collect())
        .collect();
    rows.push(row("Sentence length (words)", &lengths[0], &lengths[1])?);
    let wl = per_passage(&|u| Ok(word_mean(u, |t| t.letters as f64)))?;
    rows.push(row("Mean word length (characters)", &wl[0], &wl[1])?);

    if let Some(store) = store {
        if store.frequency_table().is_some() {
            let v = per_passage(&|u| store.aggregate(corpus, &WordSource::Frequency, u))?;
            rows.push(row("Mean word frequency (bits)", &v[0], &v[1])?);
        }
        if store.has_column(DEFAULT_SET, Column::Surprisal) {
            let src = WordSource::Column {
                set: DEFAULT_SET.to_string(),
                column: Column::Surprisal,
            };
            let v = per_passage(&|u| store.aggregate(corpus, &src, u))?;
            rows.push(row("Mean word surprisal (bits)", &v[0], &v[1])?);
        }
    }

    Ok(CorpusStats {
        passages_original: passages[0].len(),
        passages_simplified: passages[1].len(),
        rows,
    })
}
