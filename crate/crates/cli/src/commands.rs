//! Subcommand implementations.
//!
//! Tabular commands print to stdout in the chosen format, or write
//! `<name>.<ext>` under `--out` when it is given. `eval` and `plot` always
//! write files into the output directory.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use readease_annotate::{Cache, Decoding, Endpoint, PromptSpec, ProviderKind, Settings, UnitText, Variant};
use readease_core::corpus::stats::corpus_stats;
use readease_core::eval::{
    run_eval, EvalConfig, EvalInputs, EvalReport, FilterComparison, PValueMethod, SteigerGrid,
};
use readease_core::eye::{ingest_fixations, EaseTable, Measure, Trial};
use readease_core::measures::read_word_measures;
use readease_core::registry::{Family, MethodSpec};
use readease_core::scoring::Scorer;
use readease_core::stats::Tier;
use readease_core::{Granularity, TextUnit};
use serde::{Deserialize, Serialize};

use crate::config::{ensure_dir, split_list, RunConfig, WordMeasureFile};
use crate::session::{
    build_filters, load_perplexities, parse_granularities, parse_measures, Filters, Session,
};
use crate::table::{exact, num, Table};
use crate::{ConfigError, Format};

/// Options shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Globals {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Input files; each flag overrides the matching config key.
#[derive(Debug, Clone, Default, Args)]
pub struct InputArgs {
    /// Corpus JSON.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Fixation report CSV (repeatable).
    #[arg(long)]
    pub fixations: Vec<PathBuf>,
    /// Word-measures TSV as `PATH` or `SET=PATH` (repeatable).
    #[arg(long = "word-measures")]
    pub word_measures: Vec<String>,
    /// Per-unit scores as `METHOD=PATH` (repeatable).
    #[arg(long = "unit-scores")]
    pub unit_scores: Vec<String>,
    /// Annotation export CSV (repeatable).
    #[arg(long)]
    pub annotations: Vec<PathBuf>,
    /// Perplexity JSON (repeatable).
    #[arg(long)]
    pub perplexity: Vec<PathBuf>,
    #[arg(long = "frequency-table")]
    pub frequency_table: Option<PathBuf>,
    #[arg(long = "easy-words")]
    pub easy_words: Option<PathBuf>,
    /// Extra registry entries (TOML).
    #[arg(long)]
    pub registry: Option<PathBuf>,
}

/// Method, measure, granularity and reader selection.
#[derive(Debug, Clone, Default, Args)]
pub struct SelectArgs {
    /// Comma-separated method ids.
    #[arg(long)]
    pub methods: Option<String>,
    /// Comma-separated reading-ease measures, e.g. `TF,SR,RR`.
    #[arg(long)]
    pub measures: Option<String>,
    /// `sentence`, `passage` or `both`.
    #[arg(long)]
    pub granularity: Option<String>,
    /// Restrict trials to one reader group.
    #[arg(long)]
    pub group: Option<String>,
    /// Restrict trials to one reading regime.
    #[arg(long)]
    pub regime: Option<String>,
    /// Reader groups to evaluate separately and compare, e.g. `L1,L2`.
    #[arg(long)]
    pub groups: Option<String>,
    /// Reading regimes to evaluate separately and compare.
    #[arg(long)]
    pub regimes: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    #[command(flatten)]
    pub select: SelectArgs,
    /// Bootstrap resamples per correlation.
    #[arg(long)]
    pub resamples: Option<usize>,
    /// Confidence level of the intervals.
    #[arg(long = "ci-level")]
    pub ci_level: Option<f64>,
    /// `analytic` or `bootstrap`.
    #[arg(long = "p-values")]
    pub p_values: Option<String>,
    #[arg(long = "no-spearman")]
    pub no_spearman: bool,
    #[arg(long = "no-uncontrolled")]
    pub no_uncontrolled: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PlotArgs {
    /// results.json written by `eval`; defaults to the output directory's.
    #[arg(long)]
    pub results: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct AnnotateArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    /// `sentence`, `passage` or `both`.
    #[arg(long)]
    pub granularity: Option<String>,
    /// Model identifier written to the export and the cache key.
    #[arg(long = "model-id")]
    pub model_id: Option<String>,
    /// score, score_criteria, grade or grade_criteria.
    #[arg(long)]
    pub variant: Option<String>,
    /// openai or anthropic.
    #[arg(long)]
    pub provider: Option<String>,
    #[arg(long = "base-url")]
    pub base_url: Option<String>,
    /// Model name sent to the provider; defaults to the model id.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long = "api-key-env")]
    pub api_key_env: Option<String>,
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long)]
    pub retries: Option<usize>,
    #[arg(long)]
    pub concurrency: Option<usize>,
    #[arg(long = "requests-per-second")]
    pub requests_per_second: Option<u32>,
    #[arg(long = "max-tokens")]
    pub max_tokens: Option<u32>,
    /// Export path; defaults to `annotations_<model>_<variant>.csv` in the
    /// output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_assignment(raw: &str, what: &str) -> Result<(String, PathBuf)> {
    match raw.split_once('=') {
        Some((k, v)) if !k.is_empty() && !v.is_empty() => Ok((k.to_string(), PathBuf::from(v))),
        _ => Err(ConfigError(format!("{what} expects KEY=PATH, got `{raw}`")).into()),
    }
}

/// Reads the config file, if any, and applies flag overrides.
pub fn load_config(g: &Globals, inputs: &InputArgs) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &inputs.corpus {
        cfg.corpus = Some(p.clone());
    }
    if !inputs.fixations.is_empty() {
        cfg.fixations = inputs.fixations.clone();
    }
    if !inputs.word_measures.is_empty() {
        cfg.word_measures = inputs
            .word_measures
            .iter()
            .map(|raw| match raw.split_once('=') {
                Some((set, path)) => WordMeasureFile {
                    set: set.to_string(),
                    path: path.into(),
                },
                None => WordMeasureFile {
                    set: readease_core::measures::DEFAULT_SET.to_string(),
                    path: raw.into(),
                },
            })
            .collect();
    }
    for raw in &inputs.unit_scores {
        let (method, path) = parse_assignment(raw, "--unit-scores")?;
        cfg.unit_scores.insert(method, path);
    }
    if !inputs.annotations.is_empty() {
        cfg.annotations = inputs.annotations.clone();
    }
    if !inputs.perplexity.is_empty() {
        cfg.perplexity = inputs.perplexity.clone();
    }
    for (flag, slot) in [
        (&inputs.frequency_table, &mut cfg.frequency_table),
        (&inputs.easy_words, &mut cfg.easy_words),
        (&inputs.registry, &mut cfg.registry),
    ] {
        if flag.is_some() {
            slot.clone_from(flag);
        }
    }
    if g.seed.is_some() {
        cfg.seed = g.seed;
    }
    if g.out.is_some() {
        cfg.out.clone_from(&g.out);
    }
    Ok(cfg)
}

fn apply_select(cfg: &mut RunConfig, s: &SelectArgs) {
    if let Some(m) = &s.methods {
        cfg.methods = Some(split_list(m));
    }
    if let Some(m) = &s.measures {
        cfg.measures = Some(split_list(m));
    }
    if let Some(g) = &s.granularity {
        cfg.granularities = Some(split_list(g));
    }
    if s.group.is_some() {
        cfg.group.clone_from(&s.group);
    }
    if s.regime.is_some() {
        cfg.regime.clone_from(&s.regime);
    }
    if let Some(g) = &s.groups {
        cfg.groups = Some(split_list(g));
    }
    if let Some(r) = &s.regimes {
        cfg.regimes = Some(split_list(r));
    }
}

fn granularities(cfg: &RunConfig, default: &[&str]) -> Result<Vec<Granularity>> {
    match &cfg.granularities {
        Some(g) => parse_granularities(g),
        None => parse_granularities(&default.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
    }
}

fn measures(cfg: &RunConfig, default: &[Measure]) -> Result<Vec<Measure>> {
    match &cfg.measures {
        Some(m) => parse_measures(m),
        None => Ok(default.to_vec()),
    }
}

fn filters(cfg: &RunConfig) -> Result<Filters> {
    build_filters(
        cfg.group.as_deref(),
        cfg.regime.as_deref(),
        cfg.groups.as_deref().unwrap_or(&[]),
        cfg.regimes.as_deref().unwrap_or(&[]),
    )
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Prints a table (text or CSV) or a JSON value, or writes it under `--out`.
fn emit(g: &Globals, name: &str, table: &Table, json: &impl Serialize) -> Result<()> {
    let mut buf = Vec::new();
    match g.format {
        Format::Text => table.write_text(&mut buf)?,
        Format::Csv => table.write_csv(&mut buf)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, json)?;
            buf.push(b'\n');
        }
    }
    match &g.out {
        Some(dir) => {
            ensure_dir(dir)?;
            let ext = match g.format {
                Format::Text => "txt",
                Format::Csv => "csv",
                Format::Json => "json",
            };
            let path = dir.join(format!("{name}.{ext}"));
            write_file(&path, &buf)?;
            eprintln!("wrote {}", path.display());
        }
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

fn tier_label(t: Option<Tier>) -> String {
    t.map(|t| t.stars().to_string()).unwrap_or_default()
}

pub fn stats(g: &Globals, inputs: &InputArgs) -> Result<()> {
    let session = Session::load(load_config(g, inputs)?)?;
    let stats = corpus_stats(&session.corpus, Some(&session.store))?;
    let mut table = match g.format {
        Format::Csv => Table::new([
            "label",
            "original_mean",
            "original_half_width",
            "original_n",
            "simplified_mean",
            "simplified_half_width",
            "simplified_n",
            "t",
            "df",
            "p_value",
            "tier",
        ]),
        _ => Table::new(["statistic", "original", "simplified", "t", "p", "sig"]),
    };
    for r in &stats.rows {
        let tier = r.test.map(|t| Tier::from_p(t.p_value));
        let row = match g.format {
            Format::Csv => vec![
                r.label.clone(),
                exact(r.original.mean),
                exact(r.original.half_width),
                r.original.n.to_string(),
                exact(r.simplified.mean),
                exact(r.simplified.half_width),
                r.simplified.n.to_string(),
                r.test.map(|t| exact(t.t)).unwrap_or_default(),
                r.test.map(|t| exact(t.df)).unwrap_or_default(),
                r.test.map(|t| exact(t.p_value)).unwrap_or_default(),
                tier_label(tier),
            ],
            _ => vec![
                r.label.clone(),
                format!("{:.2} ± {:.2}", r.original.mean, r.original.half_width),
                format!("{:.2} ± {:.2}", r.simplified.mean, r.simplified.half_width),
                num(r.test.map(|t| t.t), 2),
                r.test.map(|t| format!("{:.3e}", t.p_value)).unwrap_or_default(),
                tier_label(tier),
            ],
        };
        table.push(row);
    }
    if g.format == Format::Text && g.out.is_none() {
        println!(
            "passages: {} original, {} simplified",
            stats.passages_original, stats.passages_simplified
        );
    }
    emit(g, "stats", &table, &stats)
}

fn scorer(session: &Session) -> Scorer<'_> {
    Scorer {
        corpus: &session.corpus,
        easy_words: &session.easy_words,
        store: &session.store,
        external: &session.external,
    }
}

pub fn score(g: &Globals, inputs: &InputArgs, select: &SelectArgs) -> Result<()> {
    let mut cfg = load_config(g, inputs)?;
    apply_select(&mut cfg, select);
    let grans = granularities(&cfg, &["passage"])?;
    let session = Session::load(cfg)?;
    let methods = session.methods(None)?;
    let units = session.units(&grans);
    let scores = scorer(&session).score_table(&methods, &units)?;
    let rows = scores.rows(units.iter().copied());
    let mut table = Table::new(["unit_id", "method", "value"]);
    for r in &rows {
        table.push(vec![r.unit_id.clone(), r.method.clone(), exact(r.value)]);
    }
    emit(g, "scores", &table, &rows)
}

fn load_trials(session: &Session) -> Result<Vec<Trial>> {
    if session.cfg.fixations.is_empty() {
        return Err(
            ConfigError("no eye-movement data configured (use --fixations or `fixations`)".into()).into(),
        );
    }
    let mut trials = Vec::new();
    for path in &session.cfg.fixations {
        trials.extend(ingest_fixations(path, &session.corpus)?);
    }
    if trials.is_empty() {
        return Err(readease_core::Error::NoTrials("fixation files contain no trials".into()).into());
    }
    Ok(trials)
}

#[derive(Serialize)]
struct EyeRow<'a> {
    measure: Measure,
    group: &'a str,
    regime: &'a str,
    unit_id: &'a str,
    level: &'a str,
    value: f64,
    n_participants: usize,
}

pub fn eye(g: &Globals, inputs: &InputArgs, select: &SelectArgs) -> Result<()> {
    let mut cfg = load_config(g, inputs)?;
    apply_select(&mut cfg, select);
    let grans = granularities(&cfg, &["both"])?;
    let measures = measures(&cfg, &Measure::ALL)?;
    let filters = filters(&cfg)?;
    let session = Session::load(cfg)?;
    let trials = load_trials(&session)?;
    let units = session.units(&grans);
    let ease = EaseTable::build(&trials, &units, &measures, &filters.all);
    let mut rows = Vec::new();
    for (key, v) in ease.iter() {
        rows.push(EyeRow {
            measure: key.measure,
            group: key.filter.group.map_or("all", |g| g.as_str()),
            regime: key.filter.regime.map_or("all", |r| r.as_str()),
            unit_id: &v.unit_id,
            level: v.level.as_str(),
            value: v.value,
            n_participants: v.n_participants,
        });
    }
    let mut table = Table::new([
        "measure",
        "group",
        "regime",
        "unit_id",
        "level",
        "value",
        "n_participants",
    ]);
    for r in &rows {
        table.push(vec![
            r.measure.to_string(),
            r.group.into(),
            r.regime.into(),
            r.unit_id.into(),
            r.level.into(),
            exact(r.value),
            r.n_participants.to_string(),
        ]);
    }
    emit(g, "reading_ease", &table, &rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodInfo {
    pub id: String,
    pub label: String,
    pub year: Option<u16>,
    pub family: Family,
}

impl From<&MethodSpec> for MethodInfo {
    fn from(m: &MethodSpec) -> Self {
        MethodInfo {
            id: m.id.clone(),
            label: m.label.clone(),
            year: m.year,
            family: m.family,
        }
    }
}

/// Contents of `results.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsFile {
    pub methods: Vec<MethodInfo>,
    pub report: EvalReport,
}

#[derive(Serialize)]
struct SteigerFile<'a> {
    grids: &'a [SteigerGrid],
    comparisons: &'a [FilterComparison],
}

fn eval_config(cfg: &RunConfig) -> EvalConfig {
    let mut ec = EvalConfig::default();
    ec.bootstrap.seed = cfg.seed.unwrap_or(0);
    if let Some(r) = cfg.resamples {
        ec.bootstrap.resamples = r;
    }
    if let Some(l) = cfg.ci_level {
        ec.bootstrap.level = l;
    }
    ec.p_values = cfg.p_values.unwrap_or_default();
    ec.spearman = cfg.spearman.unwrap_or(true);
    ec.uncontrolled = cfg.uncontrolled.unwrap_or(true);
    ec
}

fn check_audit(session: &Session, methods: &[&MethodSpec], units: &[&TextUnit]) -> Result<()> {
    let sources: Vec<_> = methods.iter().filter_map(|m| m.source.word_source()).collect();
    let gaps = session
        .store
        .audit(&session.corpus, units.iter().copied(), &sources)?;
    if let Some(first) = gaps.first() {
        bail!(
            "word-measure audit failed: {} unit/measure combinations have missing word values \
             (first: `{}` in {} at word indices {:?})",
            gaps.len(),
            first.measure,
            first.unit_id,
            first.missing_indices
        );
    }
    Ok(())
}

pub fn eval(g: &Globals, args: &EvalArgs) -> Result<()> {
    let mut cfg = load_config(g, &args.inputs)?;
    apply_select(&mut cfg, &args.select);
    if args.resamples.is_some() {
        cfg.resamples = args.resamples;
    }
    if args.ci_level.is_some() {
        cfg.ci_level = args.ci_level;
    }
    if let Some(p) = &args.p_values {
        cfg.p_values = Some(match p.as_str() {
            "analytic" => PValueMethod::Analytic,
            "bootstrap" => PValueMethod::Bootstrap,
            other => {
                return Err(ConfigError(format!(
                    "--p-values: expected analytic or bootstrap, got `{other}`"
                ))
                .into())
            }
        });
    }
    if args.no_spearman {
        cfg.spearman = Some(false);
    }
    if args.no_uncontrolled {
        cfg.uncontrolled = Some(false);
    }
    if cfg.fixations.is_empty() {
        return Err(
            ConfigError("eval needs eye-movement data (use --fixations or `fixations`)".into()).into(),
        );
    }
    let grans = granularities(&cfg, &["both"])?;
    let measures = measures(&cfg, &Measure::MAIN)?;
    let filters = filters(&cfg)?;
    let ec = eval_config(&cfg);
    let out_dir = cfg.out_dir();

    let session = Session::load(cfg)?;
    let methods = session.methods(None)?;
    if methods.is_empty() {
        return Err(ConfigError("no scoring method has its inputs configured".into()).into());
    }
    let units = session.units(&grans);
    check_audit(&session, &methods, &units)?;
    let trials = load_trials(&session)?;

    let scores = scorer(&session).score_table(&methods, &units)?;
    let ease = EaseTable::build(&trials, &units, &measures, &filters.all);
    let perplexities = load_perplexities(&session.cfg.perplexity, &methods)?;
    let inputs = EvalInputs {
        corpus: &session.corpus,
        methods: methods.clone(),
        scores: &scores,
        ease: &ease,
        measures,
        granularities: grans,
        filters: filters.all.clone(),
        comparisons: filters.comparisons.clone(),
        perplexities,
    };
    let report = run_eval(&inputs, &ec)?;

    ensure_dir(&out_dir)?;
    let steiger = SteigerFile {
        grids: &report.steiger_grids,
        comparisons: &report.comparisons,
    };
    let mut steiger_json = serde_json::to_vec_pretty(&steiger)?;
    steiger_json.push(b'\n');
    write_file(&out_dir.join("steiger.json"), &steiger_json)?;
    let results = ResultsFile {
        methods: methods.iter().map(|m| MethodInfo::from(*m)).collect(),
        report,
    };
    let mut results_json = serde_json::to_vec_pretty(&results)?;
    results_json.push(b'\n');
    write_file(&out_dir.join("results.json"), &results_json)?;

    let mut table = Table::new([
        "method",
        "measure",
        "granularity",
        "readers",
        "n",
        "r",
        "ci",
        "p",
        "sig",
    ]);
    for r in &results.report.results {
        let filter = readease_core::eye::TrialFilter {
            group: r.group,
            regime: r.regime,
        };
        let p = r.pearson;
        table.push(vec![
            r.method.clone(),
            r.measure.to_string(),
            r.granularity.to_string(),
            filter.to_string(),
            r.n.to_string(),
            num(p.map(|p| p.value), 3),
            p.map(|p| format!("[{:.3}, {:.3}]", p.ci_low, p.ci_high))
                .or_else(|| r.error.clone())
                .unwrap_or_default(),
            p.map(|p| format!("{:.2e}", p.p_value)).unwrap_or_default(),
            tier_label(p.map(|p| p.tier)),
        ]);
    }
    let mut buf = Vec::new();
    match g.format {
        Format::Text => table.write_text(&mut buf)?,
        Format::Csv => table.write_csv(&mut buf)?,
        Format::Json => buf.extend_from_slice(&results_json),
    }
    std::io::stdout().write_all(&buf)?;
    eprintln!(
        "wrote {} and {}",
        out_dir.join("results.json").display(),
        out_dir.join("steiger.json").display()
    );
    Ok(())
}

pub fn plot(g: &Globals, args: &PlotArgs) -> Result<()> {
    let cfg = load_config(g, &InputArgs::default())?;
    let out_dir = cfg.out_dir();
    let path = args
        .results
        .clone()
        .unwrap_or_else(|| out_dir.join("results.json"));
    let raw = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let results: ResultsFile =
        serde_json::from_str(&raw).with_context(|| format!("{}: not a results file", path.display()))?;
    ensure_dir(&out_dir)?;
    for p in crate::plot::render_all(&results, &out_dir)? {
        println!("{}", p.display());
    }
    Ok(())
}

pub fn annotate(g: &Globals, args: &AnnotateArgs) -> Result<()> {
    let mut cfg = load_config(g, &args.inputs)?;
    if let Some(gr) = &args.granularity {
        cfg.granularities = Some(split_list(gr));
    }
    let a = cfg.annotate.clone();
    let model_id = args
        .model_id
        .clone()
        .or(a.model_id)
        .ok_or_else(|| ConfigError("annotate needs --model-id".into()))?;
    let variant: Variant = args
        .variant
        .clone()
        .or(a.variant)
        .map(|v| v.parse())
        .transpose()?
        .unwrap_or_default();
    let provider = match args.provider.clone().or(a.provider).as_deref() {
        None | Some("openai") => ProviderKind::Openai,
        Some("anthropic") => ProviderKind::Anthropic,
        Some(other) => return Err(ConfigError(format!("unknown provider `{other}`")).into()),
    };
    let base_url = args
        .base_url
        .clone()
        .or(a.base_url)
        .ok_or_else(|| ConfigError("annotate needs --base-url".into()))?;
    let api_key_env = args.api_key_env.clone().or(a.api_key_env).unwrap_or_else(|| {
        match provider {
            ProviderKind::Openai => "OPENAI_API_KEY",
            ProviderKind::Anthropic => "ANTHROPIC_API_KEY",
        }
        .to_string()
    });
    let endpoint = Endpoint {
        provider,
        base_url,
        model: args.model.clone().or(a.model).unwrap_or_else(|| model_id.clone()),
        api_key_env,
    };
    let defaults = Settings::default();
    let settings = Settings {
        decoding: Decoding {
            max_tokens: args
                .max_tokens
                .or(a.max_tokens)
                .unwrap_or(defaults.decoding.max_tokens),
            ..defaults.decoding
        },
        retries: args.retries.or(a.retries).unwrap_or(defaults.retries),
        concurrency: args
            .concurrency
            .or(a.concurrency)
            .unwrap_or(defaults.concurrency)
            .max(1),
        requests_per_second: args
            .requests_per_second
            .or(a.requests_per_second)
            .unwrap_or(defaults.requests_per_second)
            .max(1),
        ..defaults
    };
    let out_dir = cfg.out_dir();
    let cache_dir = args
        .cache
        .clone()
        .or(a.cache)
        .unwrap_or_else(|| out_dir.join("cache"));
    let output = args
        .output
        .clone()
        .unwrap_or_else(|| out_dir.join(format!("annotations_{model_id}_{variant}.csv")));
    let grans = granularities(&cfg, &["passage"])?;

    let session = Session::load(cfg)?;
    let units: Vec<UnitText> = session
        .units(&grans)
        .into_iter()
        .map(|u| UnitText {
            unit_id: u.unit_id.clone(),
            text: u.text.clone(),
        })
        .collect();
    let cache = Cache::open(&cache_dir)?;
    let spec = PromptSpec::builtin(variant);
    let runtime = tokio::runtime::Runtime::new().context("starting async runtime")?;
    let run = runtime.block_on(readease_annotate::annotate(
        &units, &model_id, &spec, &endpoint, &settings, &cache,
    ))?;
    if let Some(parent) = output.parent() {
        ensure_dir(parent)?;
    }
    readease_annotate::write_annotations(&output, &run.results)?;
    let cached = run.results.iter().filter(|r| r.cached).count();
    println!(
        "{} units, {} requests, {} cached, {} unparseable -> {}",
        run.results.len(),
        run.requests,
        cached,
        run.failures(),
        output.display()
    );
    Ok(())
}

pub fn ingest(g: &Globals, inputs: &InputArgs) -> Result<()> {
    let session = Session::load(load_config(g, inputs)?)?;
    let mut table = Table::new(["input", "path", "records"]);
    let cfg = &session.cfg;
    table.push(vec![
        "corpus".into(),
        cfg.corpus_path()?.display().to_string(),
        format!(
            "{} units, {} pairs",
            session.corpus.units().len(),
            session.corpus.pairs().len()
        ),
    ]);
    for wm in &cfg.word_measures {
        let rows = read_word_measures(&wm.path)?;
        table.push(vec![
            format!("word measures ({})", wm.set),
            wm.path.display().to_string(),
            format!("{} rows", rows.len()),
        ]);
    }
    for path in &cfg.fixations {
        let trials = ingest_fixations(path, &session.corpus)?;
        table.push(vec![
            "fixations".into(),
            path.display().to_string(),
            format!("{} trials", trials.len()),
        ]);
    }
    for (method, path) in &cfg.unit_scores {
        let n = session.external.get(method).map_or(0, BTreeMap::len);
        table.push(vec![
            format!("unit scores ({method})"),
            path.display().to_string(),
            format!("{n} units"),
        ]);
    }
    for path in &cfg.annotations {
        table.push(vec![
            "annotations".into(),
            path.display().to_string(),
            "ok".into(),
        ]);
    }
    let all_methods: Vec<&MethodSpec> = session.registry.methods().iter().collect();
    for path in &cfg.perplexity {
        let ppl = load_perplexities(std::slice::from_ref(path), &all_methods)?;
        table.push(vec![
            "perplexity".into(),
            path.display().to_string(),
            format!("{} methods", ppl.len()),
        ]);
    }

    let units = session.units(&[Granularity::Sentence, Granularity::Passage]);
    let methods = session.methods(None)?;
    let sources: Vec<_> = methods.iter().filter_map(|m| m.source.word_source()).collect();
    let gaps = session
        .store
        .audit(&session.corpus, units.iter().copied(), &sources)?;
    table.push(vec![
        "audit".into(),
        String::new(),
        format!("{} gaps over {} measures", gaps.len(), sources.len()),
    ]);
    emit(g, "ingest", &table, &gaps)?;
    if !gaps.is_empty() {
        bail!(
            "word-measure audit found {} units with missing values",
            gaps.len()
        );
    }
    Ok(())
}
