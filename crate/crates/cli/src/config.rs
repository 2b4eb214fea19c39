//! Run configuration: a TOML file plus command-line overrides.
//!
//! Relative paths in the file resolve against the file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use readease_core::eval::PValueMethod;
use serde::Deserialize;

use crate::ConfigError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordMeasureFile {
    #[serde(default = "default_set")]
    pub set: String,
    pub path: PathBuf,
}

fn default_set() -> String {
    readease_core::measures::DEFAULT_SET.to_string()
}

/// Endpoint and decoding settings for `annotate`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotateConfig {
    pub model_id: Option<String>,
    pub variant: Option<String>,
    pub provider: Option<String>,
    pub base_url: Option<String>,
    pub model: Option<String>,
    pub api_key_env: Option<String>,
    pub cache: Option<PathBuf>,
    pub retries: Option<usize>,
    pub concurrency: Option<usize>,
    pub requests_per_second: Option<u32>,
    pub max_tokens: Option<u32>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    #[serde(default)]
    pub fixations: Vec<PathBuf>,
    pub easy_words: Option<PathBuf>,
    pub frequency_table: Option<PathBuf>,
    pub oov_floor: Option<f64>,
    /// Extra registry entries appended to the built-in registry.
    pub registry: Option<PathBuf>,
    #[serde(default)]
    pub word_measures: Vec<WordMeasureFile>,
    /// Per-unit score files keyed by method id.
    #[serde(default)]
    pub unit_scores: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub annotations: Vec<PathBuf>,
    /// Perplexity JSON files (`{model_id, ppl, token_count}` or a list).
    #[serde(default)]
    pub perplexity: Vec<PathBuf>,
    pub methods: Option<Vec<String>>,
    pub measures: Option<Vec<String>>,
    pub granularities: Option<Vec<String>>,
    pub group: Option<String>,
    pub regime: Option<String>,
    /// Reader groups to evaluate separately and compare.
    pub groups: Option<Vec<String>>,
    /// Reading regimes to evaluate separately and compare.
    pub regimes: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub resamples: Option<usize>,
    pub ci_level: Option<f64>,
    pub p_values: Option<PValueMethod>,
    pub spearman: Option<bool>,
    pub uncontrolled: Option<bool>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub annotate: AnnotateConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let raw =
            std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&raw).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve(base);
        Ok(cfg)
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [
            &mut self.corpus,
            &mut self.easy_words,
            &mut self.frequency_table,
            &mut self.registry,
            &mut self.out,
            &mut self.annotate.cache,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        self.fixations.iter_mut().for_each(fix);
        self.annotations.iter_mut().for_each(fix);
        self.perplexity.iter_mut().for_each(fix);
        self.unit_scores.values_mut().for_each(fix);
        self.word_measures.iter_mut().for_each(|w| fix(&mut w.path));
    }

    pub fn corpus_path(&self) -> Result<&Path> {
        self.corpus.as_deref().ok_or_else(|| {
            ConfigError("no corpus configured (use --corpus or `corpus` in the config)".into()).into()
        })
    }

    /// Checks that every configured input exists.
    pub fn check_paths(&self) -> Result<()> {
        let mut paths: Vec<&Path> = Vec::new();
        paths.extend(self.corpus.as_deref());
        paths.extend(self.easy_words.as_deref());
        paths.extend(self.frequency_table.as_deref());
        paths.extend(self.registry.as_deref());
        paths.extend(self.fixations.iter().map(PathBuf::as_path));
        paths.extend(self.annotations.iter().map(PathBuf::as_path));
        paths.extend(self.perplexity.iter().map(PathBuf::as_path));
        paths.extend(self.unit_scores.values().map(PathBuf::as_path));
        paths.extend(self.word_measures.iter().map(|w| w.path.as_path()));
        for p in paths {
            if !p.exists() {
                return Err(ConfigError(format!("input file not found: {}", p.display())).into());
            }
        }
        Ok(())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("readease-out"))
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

/// Splits comma-separated flag values.
pub fn split_list(raw: &str) -> Vec<String> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}
