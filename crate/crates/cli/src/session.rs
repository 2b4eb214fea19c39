//! Loaded inputs shared by the commands.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use readease_core::eye::{Group, Measure, Regime, TrialFilter};
use readease_core::formulas::EasyWords;
use readease_core::measures::{
    ingest_annotations, ingest_unit_scores, FrequencyTable, MeasureStore, MeasureStoreBuilder,
    DEFAULT_OOV_FLOOR,
};
use readease_core::registry::{MethodSpec, Registry, Source};
use readease_core::{Corpus, Granularity, TextUnit};
use serde::Deserialize;

use crate::config::RunConfig;
use crate::ConfigError;

pub struct Session {
    pub cfg: RunConfig,
    pub corpus: Corpus,
    pub registry: Registry,
    pub easy_words: EasyWords,
    pub store: MeasureStore,
    /// Ingested per-unit scores keyed by method id, then unit id.
    pub external: BTreeMap<String, BTreeMap<String, f64>>,
}

impl Session {
    pub fn load(cfg: RunConfig) -> Result<Session> {
        cfg.check_paths()?;
        let corpus_path = cfg.corpus_path()?;
        let corpus = Corpus::load(corpus_path)?;
        if corpus.units().is_empty() {
            anyhow::bail!("corpus {} has no text units", corpus_path.display());
        }

        let mut registry = Registry::builtin();
        if let Some(path) = &cfg.registry {
            let raw = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
            let extra = Registry::from_toml(&raw).with_context(|| path.display().to_string())?;
            registry.extend(extra.methods().iter().cloned())?;
        }

        let easy_words = match &cfg.easy_words {
            Some(p) => EasyWords::load(p)?,
            None => EasyWords::builtin(),
        };

        let mut builder = MeasureStoreBuilder::new(&corpus);
        if let Some(p) = &cfg.frequency_table {
            builder = builder.frequency(FrequencyTable::load(
                p,
                cfg.oov_floor.unwrap_or(DEFAULT_OOV_FLOOR),
            )?);
        }
        for wm in &cfg.word_measures {
            builder.ingest_word_measures(&wm.set, &wm.path)?;
        }
        let store = builder.seal();

        let mut external = BTreeMap::new();
        for (method, path) in &cfg.unit_scores {
            let spec = registry.get(method)?;
            if spec.source != Source::UnitScores {
                return Err(ConfigError(format!("method `{method}` does not take a unit score file")).into());
            }
            let rows = ingest_unit_scores(path, method)?;
            external.insert(
                method.clone(),
                rows.into_iter().map(|r| (r.unit_id, r.value)).collect(),
            );
        }
        for spec in registry.methods() {
            let Source::Annotation { model_id, variant } = &spec.source else {
                continue;
            };
            let mut values = BTreeMap::new();
            for path in &cfg.annotations {
                for r in ingest_annotations(path, model_id, variant, &spec.id)? {
                    values.insert(r.unit_id, r.value);
                }
            }
            if !values.is_empty() {
                external.insert(spec.id.clone(), values);
            }
        }

        Ok(Session {
            cfg,
            corpus,
            registry,
            easy_words,
            store,
            external,
        })
    }

    fn available(&self, spec: &MethodSpec) -> Result<(), String> {
        match &spec.source {
            Source::Formula { .. } | Source::WordLength => Ok(()),
            Source::WordFrequency => self
                .store
                .frequency_table()
                .map(|_| ())
                .ok_or_else(|| "needs `frequency_table`".to_string()),
            Source::WordMeasure { column, set, .. } => {
                if self.store.has_column(set, *column) {
                    Ok(())
                } else {
                    Err(format!("needs column `{column}` in word-measure set `{set}`"))
                }
            }
            Source::UnitScores => self
                .external
                .contains_key(&spec.id)
                .then_some(())
                .ok_or_else(|| format!("needs a `unit_scores.{}` file", spec.id)),
            Source::Annotation { model_id, variant } => self
                .external
                .contains_key(&spec.id)
                .then_some(())
                .ok_or_else(|| format!("needs annotations for model `{model_id}`, variant `{variant}`")),
        }
    }

    /// The requested methods, or every method whose inputs are configured.
    pub fn methods(&self, requested: Option<&[String]>) -> Result<Vec<&MethodSpec>> {
        match requested.or(self.cfg.methods.as_deref()) {
            Some(ids) => {
                let specs = self.registry.select(ids)?;
                for s in &specs {
                    if let Err(why) = self.available(s) {
                        return Err(ConfigError(format!("method `{}` {why}", s.id)).into());
                    }
                }
                Ok(specs)
            }
            None => Ok(self
                .registry
                .methods()
                .iter()
                .filter(|s| self.available(s).is_ok())
                .collect()),
        }
    }

    /// Units of every pair at the given granularities, both levels.
    pub fn units(&self, granularities: &[Granularity]) -> Vec<&TextUnit> {
        granularities
            .iter()
            .flat_map(|g| self.corpus.paired_units(*g))
            .collect()
    }
}

pub fn parse_granularities(raw: &[String]) -> Result<Vec<Granularity>> {
    let mut out = Vec::new();
    for r in raw {
        if r == "both" {
            out.extend([Granularity::Sentence, Granularity::Passage]);
        } else {
            out.push(
                r.parse()
                    .map_err(|e: readease_core::Error| ConfigError(e.to_string()))?,
            );
        }
    }
    out.dedup();
    if out.is_empty() {
        return Err(ConfigError("no granularity selected".into()).into());
    }
    Ok(out)
}

pub fn parse_measures(raw: &[String]) -> Result<Vec<Measure>> {
    raw.iter()
        .map(|m| {
            m.parse()
                .map_err(|e: readease_core::Error| ConfigError(e.to_string()).into())
        })
        .collect()
}

fn parse_opt<T: std::str::FromStr<Err = readease_core::Error>>(raw: Option<&str>) -> Result<Option<T>> {
    raw.map(|r| {
        r.parse()
            .map_err(|e: readease_core::Error| ConfigError(e.to_string()).into())
    })
    .transpose()
}

/// Main filter, per-group and per-regime split filters, and the pairs of
/// split filters to compare.
pub struct Filters {
    pub all: Vec<TrialFilter>,
    pub comparisons: Vec<(TrialFilter, TrialFilter)>,
}

pub fn build_filters(
    group: Option<&str>,
    regime: Option<&str>,
    groups: &[String],
    regimes: &[String],
) -> Result<Filters> {
    let main = TrialFilter {
        group: parse_opt::<Group>(group)?,
        regime: parse_opt::<Regime>(regime)?,
    };
    let mut all = vec![main];
    let mut comparisons = Vec::new();
    let mut split = |variants: Vec<TrialFilter>| {
        for (i, a) in variants.iter().enumerate() {
            for b in &variants[i + 1..] {
                comparisons.push((*a, *b));
            }
        }
        for v in variants {
            if !all.contains(&v) {
                all.push(v);
            }
        }
    };
    let gs: Vec<Group> = groups
        .iter()
        .map(|g| {
            g.parse()
                .map_err(|e: readease_core::Error| ConfigError(e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    split(
        gs.into_iter()
            .map(|g| TrialFilter {
                group: Some(g),
                ..main
            })
            .collect(),
    );
    let rs: Vec<Regime> = regimes
        .iter()
        .map(|r| {
            r.parse()
                .map_err(|e: readease_core::Error| ConfigError(e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    split(
        rs.into_iter()
            .map(|r| TrialFilter {
                regime: Some(r),
                ..main
            })
            .collect(),
    );
    Ok(Filters { all, comparisons })
}

#[derive(Deserialize)]
struct PerplexityEntry {
    model_id: String,
    ppl: f64,
    #[allow(dead_code)]
    token_count: Option<u64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PerplexityFile {
    One(PerplexityEntry),
    Many(Vec<PerplexityEntry>),
}

/// Perplexity per method id: a method gets the perplexity of the language
/// model whose word-measure set it reads.
pub fn load_perplexities(
    paths: &[impl AsRef<Path>],
    methods: &[&MethodSpec],
) -> Result<BTreeMap<String, f64>> {
    let mut by_model = BTreeMap::new();
    for path in paths {
        let path = path.as_ref();
        let raw = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
        let file: PerplexityFile =
            serde_json::from_str(&raw).with_context(|| format!("{}: perplexity JSON", path.display()))?;
        let entries = match file {
            PerplexityFile::One(e) => vec![e],
            PerplexityFile::Many(v) => v,
        };
        for e in entries {
            if !(e.ppl.is_finite() && e.ppl >= 1.0) {
                anyhow::bail!(
                    "{}: perplexity of `{}` must be >= 1, got {}",
                    path.display(),
                    e.model_id,
                    e.ppl
                );
            }
            by_model.insert(e.model_id, e.ppl);
        }
    }
    Ok(methods
        .iter()
        .filter_map(|m| match &m.source {
            Source::WordMeasure { set, .. } => by_model.get(set).map(|&p| (m.id.clone(), p)),
            _ => None,
        })
        .collect())
}
