//! Per-unit scores for every registered method.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, TextUnit};
use crate::error::{Error, Result};
use crate::formulas::{score_unit, EasyWords};
use crate::measures::{MeasureStore, UnitScore};
use crate::registry::{MethodSpec, Source};

/// Scores keyed by method then unit id. Methods keep insertion order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    methods: Vec<String>,
    values: BTreeMap<String, BTreeMap<String, f64>>,
}

impl ScoreTable {
    pub fn insert_method(&mut self, method: &str, values: BTreeMap<String, f64>) {
        if !self.values.contains_key(method) {
            self.methods.push(method.to_string());
        }
        self.values.insert(method.to_string(), values);
    }

    pub fn get(&self, method: &str, unit_id: &str) -> Option<f64> {
        self.values.get(method)?.get(unit_id).copied()
    }

    pub fn method(&self, method: &str) -> Option<&BTreeMap<String, f64>> {
        self.values.get(method)
    }

    pub fn methods(&self) -> &[String] {
        &self.methods
    }

    /// Rows in method order, then unit order as given.
    pub fn rows<'u>(&self, units: impl IntoIterator<Item = &'u TextUnit> + Clone) -> Vec<UnitScore> {
        let mut out = Vec::new();
        for m in &self.methods {
            for u in units.clone() {
                if let Some(value) = self.get(m, &u.unit_id) {
                    out.push(UnitScore {
                        unit_id: u.unit_id.clone(),
                        method: m.clone(),
                        value,
                    });
                }
            }
        }
        out
    }
}

/// Everything needed to score units with any registry method.
pub struct Scorer<'a> {
    pub corpus: &'a Corpus,
    pub easy_words: &'a EasyWords,
    pub store: &'a MeasureStore,
    /// Ingested scores keyed by method id, then unit id.
    pub external: &'a BTreeMap<String, BTreeMap<String, f64>>,
}

impl Scorer<'_> {
    /// Scores of one method for `units`. Ingested methods only cover the
    /// units present in their file.
    pub fn score_method(&self, method: &MethodSpec, units: &[&TextUnit]) -> Result<BTreeMap<String, f64>> {
        let mut out = BTreeMap::new();
        match &method.source {
            Source::Formula { formula } => {
                for u in units {
                    let s = score_unit(*formula, u, Some(self.easy_words))?;
                    out.insert(u.unit_id.clone(), s.value);
                }
            }
            Source::UnitScores | Source::Annotation { .. } => {
                let scores = self.external.get(&method.id).ok_or_else(|| {
                    Error::Config(format!("no score file configured for method `{}`", method.id))
                })?;
                if let Some(unknown) = scores.keys().find(|id| self.corpus.unit(id).is_none()) {
                    return Err(Error::UnknownUnit(unknown.clone()));
                }
                for u in units {
                    if let Some(&v) = scores.get(&u.unit_id) {
                        out.insert(u.unit_id.clone(), v);
                    }
                }
            }
            source => {
                let ws = source.word_source().expect("word-based source");
                let sign = match source {
                    Source::WordMeasure { invert: true, .. } => -1.0,
                    _ => 1.0,
                };
                for u in units {
                    let v = self.store.aggregate(self.corpus, &ws, u)?;
                    out.insert(u.unit_id.clone(), sign * v);
                }
            }
        }
        Ok(out)
    }

    pub fn score_table(&self, methods: &[&MethodSpec], units: &[&TextUnit]) -> Result<ScoreTable> {
        let scored: Vec<Result<BTreeMap<String, f64>>> =
            methods.par_iter().map(|m| self.score_method(m, units)).collect();
        let mut table = ScoreTable::default();
        for (m, values) in methods.iter().zip(scored) {
            table.insert_method(&m.id, values?);
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::Registry;

    #[test]
    fn scores_formulas_and_externals() {
        let corpus = Corpus::from_json(
            r#"{"articles": [{"article_id": "a", "paragraphs": [
                {"paragraph_id": "p", "original": ["The cat sat on the mat."],
                 "simplified": ["A cat sat."], "alignment": [[0, 0]]}]}]}"#,
        )
        .unwrap();
        let reg = Registry::builtin();
        let easy = EasyWords::builtin();
        let store = MeasureStore::default();
        let external = BTreeMap::from([(
            "lexile".to_string(),
            BTreeMap::from([("a/p/original".to_string(), 800.0)]),
        )]);
        let scorer = Scorer {
            corpus: &corpus,
            easy_words: &easy,
            store: &store,
            external: &external,
        };
        let units: Vec<&TextUnit> = corpus.passages(crate::Level::Original).collect();
        let methods = reg.select(&["flesch_re", "lexile", "word_length"]).unwrap();
        let t = scorer.score_table(&methods, &units).unwrap();
        assert!((t.get("flesch_re", "a/p/original").unwrap() - 116.146).abs() < 1e-9);
        assert_eq!(t.get("lexile", "a/p/original"), Some(800.0));
        assert!((t.get("word_length", "a/p/original").unwrap() - 17.0 / 6.0).abs() < 1e-12);
        assert_eq!(t.rows(units.iter().copied()).len(), 3);

        let missing = reg.select(&["cml2ri"]).unwrap();
        assert!(scorer.score_table(&missing, &units).unwrap_err().is_config());
    }
}
