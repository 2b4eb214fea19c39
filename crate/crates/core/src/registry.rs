//! Registry of scoring methods and psycholinguistic measures.
//!
//! The built-in registry lives in `data/registry.toml`; a run config can add
//! entries (for example one surprisal measure per language model). The
//! registry order is the report order.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas::Formula;
use crate::measures::{Column, WordSource, DEFAULT_SET};

const BUILTIN: &str = include_str!("../data/registry.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Formula,
    Modern,
    Llm,
    Commercial,
    Psycholinguistic,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Formula => "formula",
            Family::Modern => "modern",
            Family::Llm => "llm",
            Family::Commercial => "commercial",
            Family::Psycholinguistic => "psycholinguistic",
        };
        f.write_str(s)
    }
}

fn default_set() -> String {
    DEFAULT_SET.to_string()
}

fn default_variant() -> String {
    "grade_criteria".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    Formula {
        formula: Formula,
    },
    WordLength,
    WordFrequency,
    WordMeasure {
        column: Column,
        #[serde(default = "default_set")]
        set: String,
        #[serde(default)]
        invert: bool,
    },
    UnitScores,
    Annotation {
        model_id: String,
        #[serde(default = "default_variant")]
        variant: String,
    },
}

impl Source {
    /// The per-word source for measures aggregated from word values.
    pub fn word_source(&self) -> Option<WordSource> {
        match self {
            Source::WordLength => Some(WordSource::Length),
            Source::WordFrequency => Some(WordSource::Frequency),
            Source::WordMeasure { column, set, .. } => Some(WordSource::Column {
                set: set.clone(),
                column: *column,
            }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub id: String,
    pub label: String,
    #[serde(default)]
    pub year: Option<u16>,
    pub family: Family,
    pub source: Source,
}

#[derive(Deserialize)]
struct RegistryFile {
    #[serde(default)]
    method: Vec<MethodSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Registry {
    methods: Vec<MethodSpec>,
}

impl Registry {
    pub fn builtin() -> Registry {
        Registry::from_toml(BUILTIN).expect("built-in registry is valid")
    }

    pub fn from_toml(raw: &str) -> Result<Registry> {
        let file: RegistryFile = toml::from_str(raw).map_err(|e| Error::Config(format!("registry: {e}")))?;
        let mut reg = Registry { methods: Vec::new() };
        reg.extend(file.method)?;
        Ok(reg)
    }

    /// Adds entries, each after the last existing entry of its family.
    pub fn extend(&mut self, entries: impl IntoIterator<Item = MethodSpec>) -> Result<()> {
        for spec in entries {
            if spec.id.is_empty() || spec.id.contains([',', '|', '/']) {
                return Err(Error::Config(format!("invalid method id `{}`", spec.id)));
            }
            if self.methods.iter().any(|m| m.id == spec.id) {
                return Err(Error::Config(format!("duplicate method id `{}`", spec.id)));
            }
            let at = self
                .methods
                .iter()
                .rposition(|m| m.family == spec.family)
                .map_or(self.methods.len(), |i| i + 1);
            self.methods.insert(at, spec);
        }
        Ok(())
    }

    pub fn methods(&self) -> &[MethodSpec] {
        &self.methods
    }

    pub fn ids(&self) -> Vec<&str> {
        self.methods.iter().map(|m| m.id.as_str()).collect()
    }

    pub fn get(&self, id: &str) -> Result<&MethodSpec> {
        self.methods
            .iter()
            .find(|m| m.id == id)
            .ok_or_else(|| Error::UnknownMethod {
                id: id.to_string(),
                known: self.ids().join(", "),
            })
    }

    /// Resolves ids and returns them in registry order, deduplicated.
    pub fn select<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<&MethodSpec>> {
        for id in ids {
            self.get(id.as_ref())?;
        }
        Ok(self
            .methods
            .iter()
            .filter(|m| ids.iter().any(|id| id.as_ref() == m.id))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_loads_in_order() {
        let r = Registry::builtin();
        let ids = r.ids();
        assert_eq!(
            &ids[..6],
            &[
                "flesch_re",
                "dale_chall",
                "gunning_fog",
                "ari",
                "coleman_liau",
                "flesch_kincaid"
            ]
        );
        assert!(ids.contains(&"surprisal"));
        let pll = r.get("pll").unwrap();
        assert!(matches!(pll.source, Source::WordMeasure { invert: true, .. }));
        // methods within each scoring family are chronological
        for fam in [Family::Formula, Family::Modern, Family::Llm, Family::Commercial] {
            let years: Vec<u16> = r
                .methods()
                .iter()
                .filter(|m| m.family == fam)
                .map(|m| m.year.unwrap())
                .collect();
            assert!(years.windows(2).all(|w| w[0] <= w[1]), "{fam}: {years:?}");
        }
    }

    #[test]
    fn unknown_method_lists_registry() {
        let r = Registry::builtin();
        match r.get("smog") {
            Err(Error::UnknownMethod { known, .. }) => assert!(known.contains("flesch_re")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn select_uses_registry_order() {
        let r = Registry::builtin();
        let sel = r.select(&["ari", "flesch_re"]).unwrap();
        assert_eq!(sel[0].id, "flesch_re");
        assert_eq!(sel[1].id, "ari");
    }

    #[test]
    fn extend_places_entries_with_their_family() {
        let mut r = Registry::builtin();
        r.extend([MethodSpec {
            id: "smog".into(),
            label: "SMOG".into(),
            year: Some(1969),
            family: Family::Formula,
            source: Source::UnitScores,
        }])
        .unwrap();
        assert_eq!(r.ids()[6], "smog");
        let dup = r.extend([r.get("ari").unwrap().clone()]);
        assert!(dup.is_err());
    }

    #[test]
    fn bad_toml_is_config_error() {
        let err = Registry::from_toml("[[method]]\nid = 3").unwrap_err();
        assert!(err.is_config());
    }
}
