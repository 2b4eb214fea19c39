//! Content-controlled evaluation of scoring methods against reading ease.
//!
//! For every parallel pair the original-minus-simplified difference of each
//! method's score and each reading-ease measure is taken, and a method is
//! evaluated by the correlation of the two difference vectors across pairs.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Granularity, Level, ParallelPair};
use crate::error::{Error, Result};
use crate::eye::{EaseKey, EaseTable, Group, Measure, Regime, TrialFilter};
use crate::registry::MethodSpec;
use crate::scoring::ScoreTable;
use crate::stats::bootstrap::stream_id;
use crate::stats::{
    bootstrap_correlation, correlation, correlation_pvalue, fit_r_vs_perplexity, pearson, steiger_test,
    BootstrapConfig, CorrelationKind, LinearFit, SteigerResult, Tier,
};

/// Original-minus-simplified differences for one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaRecord {
    pub pair_id: String,
    pub granularity: Granularity,
    pub scores: BTreeMap<String, Option<f64>>,
    pub ease: BTreeMap<EaseKey, Option<f64>>,
}

/// A pair left out of one variable's delta vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub pair_id: String,
    pub variable: String,
    pub missing: Vec<Level>,
}

fn ease_label(key: &EaseKey) -> String {
    format!("{}[{}]", key.measure, key.filter)
}

fn delta(
    pair: &ParallelPair,
    variable: String,
    get: impl Fn(&str) -> Option<f64>,
    audit: &mut Vec<AuditEntry>,
) -> Option<f64> {
    let o = get(&pair.original);
    let s = get(&pair.simplified);
    match (o, s) {
        (Some(o), Some(s)) => Some(o - s),
        _ => {
            let missing = [(Level::Original, o), (Level::Simplified, s)]
                .into_iter()
                .filter(|(_, v)| v.is_none())
                .map(|(l, _)| l)
                .collect();
            audit.push(AuditEntry {
                pair_id: pair.pair_id.clone(),
                variable,
                missing,
            });
            None
        }
    }
}

/// One record per pair. A variable missing on either side is `None` in the
/// record and logged in the returned audit list.
pub fn compute_deltas(
    pairs: &[&ParallelPair],
    scores: &ScoreTable,
    methods: &[&str],
    ease: &EaseTable,
    keys: &[EaseKey],
) -> (Vec<DeltaRecord>, Vec<AuditEntry>) {
    let mut audit = Vec::new();
    let records = pairs
        .iter()
        .map(|pair| DeltaRecord {
            pair_id: pair.pair_id.clone(),
            granularity: pair.granularity,
            scores: methods
                .iter()
                .map(|&m| {
                    let d = delta(pair, m.to_string(), |u| scores.get(m, u), &mut audit);
                    (m.to_string(), d)
                })
                .collect(),
            ease: keys
                .iter()
                .map(|k| {
                    let d = delta(pair, ease_label(k), |u| ease.value(k, u), &mut audit);
                    (*k, d)
                })
                .collect(),
        })
        .collect();
    (records, audit)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Var {
    Score(String),
    Ease(EaseKey),
}

impl DeltaRecord {
    fn get(&self, v: &Var) -> Option<f64> {
        match v {
            Var::Score(m) => self.scores.get(m).copied().flatten(),
            Var::Ease(k) => self.ease.get(k).copied().flatten(),
        }
    }
}

/// Columns of `vars` over the records where all of them are present.
fn complete(records: &[DeltaRecord], vars: &[Var]) -> Vec<Vec<f64>> {
    let mut cols = vec![Vec::new(); vars.len()];
    for r in records {
        let vals: Option<Vec<f64>> = vars.iter().map(|v| r.get(v)).collect();
        if let Some(vals) = vals {
            for (c, v) in cols.iter_mut().zip(vals) {
                c.push(v);
            }
        }
    }
    cols
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    #[default]
    Analytic,
    Bootstrap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub bootstrap: BootstrapConfig,
    pub p_values: PValueMethod,
    pub spearman: bool,
    pub uncontrolled: bool,
    pub steiger_grid: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            bootstrap: BootstrapConfig::default(),
            p_values: PValueMethod::Analytic,
            spearman: true,
            uncontrolled: true,
            steiger_grid: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrStat {
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_value: f64,
    pub tier: Tier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub method: String,
    pub measure: Measure,
    pub granularity: Granularity,
    pub group: Option<Group>,
    pub regime: Option<Regime>,
    pub n: usize,
    pub pearson: Option<CorrStat>,
    pub spearman: Option<CorrStat>,
    pub degenerate_resamples: usize,
    pub seed: u64,
    pub error: Option<String>,
}

/// Bootstrapped correlation of one pair of vectors.
pub fn correlate(
    x: &[f64],
    y: &[f64],
    kind: CorrelationKind,
    cfg: &EvalConfig,
    key: &str,
) -> Result<(CorrStat, usize)> {
    let value = correlation(kind, x, y)?;
    let boot = bootstrap_correlation(x, y, kind, &cfg.bootstrap, stream_id(key))?;
    let p_value = match cfg.p_values {
        PValueMethod::Analytic => correlation_pvalue(value, x.len())?,
        PValueMethod::Bootstrap => boot.p_value,
    };
    Ok((
        CorrStat {
            value,
            ci_low: boot.ci_low,
            ci_high: boot.ci_high,
            p_value,
            tier: Tier::from_p(p_value),
        },
        boot.degenerate_draws,
    ))
}

#[derive(Debug, Clone)]
struct Cell {
    method: String,
    key: EaseKey,
    granularity: Granularity,
}

impl Cell {
    fn stream_key(&self, tag: &str) -> String {
        format!(
            "{tag}|{}|{}|{}|{}",
            self.method, self.key.measure, self.granularity, self.key.filter
        )
    }

    fn evaluate(&self, x: &[f64], y: &[f64], cfg: &EvalConfig, tag: &str) -> CorrelationResult {
        let mut out = CorrelationResult {
            method: self.method.clone(),
            measure: self.key.measure,
            granularity: self.granularity,
            group: self.key.filter.group,
            regime: self.key.filter.regime,
            n: x.len(),
            pearson: None,
            spearman: None,
            degenerate_resamples: 0,
            seed: cfg.bootstrap.seed,
            error: None,
        };
        let key = self.stream_key(tag);
        match correlate(x, y, CorrelationKind::Pearson, cfg, &format!("{key}|pearson")) {
            Ok((s, d)) => {
                out.pearson = Some(s);
                out.degenerate_resamples += d;
            }
            Err(e) => {
                out.error = Some(e.to_string());
                return out;
            }
        }
        if cfg.spearman {
            match correlate(x, y, CorrelationKind::Spearman, cfg, &format!("{key}|spearman")) {
                Ok((s, d)) => {
                    out.spearman = Some(s);
                    out.degenerate_resamples += d;
                }
                Err(e) => out.error = Some(e.to_string()),
            }
        }
        out
    }
}

/// Tests whether two methods' evaluations differ, given the correlation of
/// their score deltas. Both evaluations must cover the same `n` pairs.
pub fn compare_methods(
    eval_a: &CorrelationResult,
    eval_b: &CorrelationResult,
    score_intercorrelation: f64,
    n: usize,
) -> Result<SteigerResult> {
    if eval_a.n != n || eval_b.n != n {
        return Err(Error::InvalidInput(format!(
            "pair counts differ: {} and {} vs n = {n}",
            eval_a.n, eval_b.n
        )));
    }
    if (eval_a.measure, eval_a.granularity, eval_a.group, eval_a.regime)
        != (eval_b.measure, eval_b.granularity, eval_b.group, eval_b.regime)
    {
        return Err(Error::InvalidInput(
            "evaluations use different reading-ease variables".into(),
        ));
    }
    let r = |e: &CorrelationResult| {
        e.pearson
            .map(|p| p.value)
            .ok_or_else(|| Error::UndefinedCorrelation(format!("no correlation for {}", e.method)))
    };
    steiger_test(r(eval_a)?, r(eval_b)?, score_intercorrelation, n)
}

/// Steiger test between two methods on their common pairs.
fn steiger_methods(records: &[DeltaRecord], a: &str, b: &str, key: EaseKey) -> Result<SteigerResult> {
    let cols = complete(
        records,
        &[Var::Ease(key), Var::Score(a.into()), Var::Score(b.into())],
    );
    let (e, sa, sb) = (&cols[0], &cols[1], &cols[2]);
    steiger_test(pearson(e, sa)?, pearson(e, sb)?, pearson(sa, sb)?, e.len())
}

/// Tests whether a method's evaluation differs between two trial filters
/// (reader groups or reading regimes) over the pairs both cover.
pub fn compare_groups(
    records: &[DeltaRecord],
    method: &str,
    measure: Measure,
    a: TrialFilter,
    b: TrialFilter,
) -> Result<SteigerResult> {
    let score = Var::Score(method.into());
    let ka = Var::Ease(EaseKey { measure, filter: a });
    let kb = Var::Ease(EaseKey { measure, filter: b });
    let covered = |k: &Var| -> BTreeSet<&str> {
        records
            .iter()
            .filter(|r| r.get(&score).is_some() && r.get(k).is_some())
            .map(|r| r.pair_id.as_str())
            .collect()
    };
    if covered(&ka).is_disjoint(&covered(&kb)) {
        return Err(Error::InvalidInput(format!(
            "non-overlapping pairs for {a} and {b}"
        )));
    }
    let cols = complete(records, &[score, ka, kb]);
    let (s, ea, eb) = (&cols[0], &cols[1], &cols[2]);
    steiger_test(pearson(s, ea)?, pearson(s, eb)?, pearson(ea, eb)?, s.len())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteigerCell {
    pub row: String,
    pub col: String,
    pub n: usize,
    pub z: Option<f64>,
    pub p_value: Option<f64>,
    pub tier: Option<Tier>,
    pub error: Option<String>,
}

/// Pairwise method comparisons for one reading-ease variable. `z[i][j] > 0`
/// means method `i` correlates more strongly than method `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteigerGrid {
    pub measure: Measure,
    pub granularity: Granularity,
    pub group: Option<Group>,
    pub regime: Option<Regime>,
    pub methods: Vec<String>,
    pub z: Vec<Vec<Option<f64>>>,
    pub p_value: Vec<Vec<Option<f64>>>,
    pub cells: Vec<SteigerCell>,
}

fn steiger_grid(
    records: &[DeltaRecord],
    methods: &[String],
    key: EaseKey,
    granularity: Granularity,
) -> SteigerGrid {
    let k = methods.len();
    let tasks: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let results: Vec<Result<SteigerResult>> = tasks
        .par_iter()
        .map(|&(i, j)| steiger_methods(records, &methods[i], &methods[j], key))
        .collect();
    let mut z = vec![vec![None; k]; k];
    let mut p = vec![vec![None; k]; k];
    for i in 0..k {
        z[i][i] = Some(0.0);
        p[i][i] = Some(1.0);
    }
    let mut cells = Vec::new();
    for (&(i, j), res) in tasks.iter().zip(results) {
        let cell = |row: usize, col: usize, sign: f64| match &res {
            Ok(s) => SteigerCell {
                row: methods[row].clone(),
                col: methods[col].clone(),
                n: s.n,
                z: Some(sign * s.z),
                p_value: Some(s.p_value),
                tier: Some(Tier::from_p(s.p_value)),
                error: None,
            },
            Err(e) => SteigerCell {
                row: methods[row].clone(),
                col: methods[col].clone(),
                n: 0,
                z: None,
                p_value: None,
                tier: None,
                error: Some(e.to_string()),
            },
        };
        if let Ok(s) = &res {
            z[i][j] = Some(s.z);
            z[j][i] = Some(-s.z);
            p[i][j] = Some(s.p_value);
            p[j][i] = Some(s.p_value);
        }
        cells.push(cell(i, j, 1.0));
        cells.push(cell(j, i, -1.0));
    }
    cells.sort_by_key(|c| {
        let pos = |m: &str| methods.iter().position(|x| x == m).unwrap();
        (pos(&c.row), pos(&c.col))
    });
    SteigerGrid {
        measure: key.measure,
        granularity,
        group: key.filter.group,
        regime: key.filter.regime,
        methods: methods.to_vec(),
        z,
        p_value: p,
        cells,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterComparison {
    pub method: String,
    pub measure: Measure,
    pub granularity: Granularity,
    pub a: TrialFilter,
    pub b: TrialFilter,
    pub result: Option<SteigerResult>,
    pub tier: Option<Tier>,
    pub error: Option<String>,
}

/// Pearson correlations between the score deltas of every pair of methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Intercorrelation {
    pub granularity: Granularity,
    pub methods: Vec<String>,
    pub r: Vec<Vec<Option<f64>>>,
    pub n: Vec<Vec<usize>>,
}

fn intercorrelation(
    records: &[DeltaRecord],
    methods: &[String],
    granularity: Granularity,
) -> Intercorrelation {
    let k = methods.len();
    let mut r = vec![vec![None; k]; k];
    let mut n = vec![vec![0; k]; k];
    for i in 0..k {
        for j in i..k {
            let cols = complete(
                records,
                &[Var::Score(methods[i].clone()), Var::Score(methods[j].clone())],
            );
            let v = pearson(&cols[0], &cols[1]).ok();
            r[i][j] = v;
            r[j][i] = v;
            n[i][j] = cols[0].len();
            n[j][i] = cols[0].len();
        }
    }
    Intercorrelation {
        granularity,
        methods: methods.to_vec(),
        r,
        n,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerplexityPoint {
    pub method: String,
    pub log_perplexity: f64,
    pub r: f64,
}

/// Linear fit of evaluation r against natural-log perplexity across
/// language models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerplexityFit {
    pub measure: Measure,
    pub granularity: Granularity,
    pub group: Option<Group>,
    pub regime: Option<Regime>,
    pub controlled: bool,
    pub points: Vec<PerplexityPoint>,
    pub fit: Option<LinearFit>,
    pub error: Option<String>,
}

/// Inputs of a full evaluation run.
pub struct EvalInputs<'a> {
    pub corpus: &'a Corpus,
    pub methods: Vec<&'a MethodSpec>,
    pub scores: &'a ScoreTable,
    pub ease: &'a EaseTable,
    pub measures: Vec<Measure>,
    pub granularities: Vec<Granularity>,
    pub filters: Vec<TrialFilter>,
    /// Filter pairs to compare with Steiger's test, e.g. L1 vs L2.
    pub comparisons: Vec<(TrialFilter, TrialFilter)>,
    /// Perplexity per method id, for language-model surprisal methods.
    pub perplexities: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub seed: u64,
    pub resamples: usize,
    pub ci_level: f64,
    pub p_values: PValueMethod,
    pub results: Vec<CorrelationResult>,
    pub uncontrolled: Vec<CorrelationResult>,
    pub steiger_grids: Vec<SteigerGrid>,
    pub comparisons: Vec<FilterComparison>,
    pub score_intercorrelations: Vec<Intercorrelation>,
    pub perplexity_fits: Vec<PerplexityFit>,
    pub audit: Vec<AuditEntry>,
}

/// Correlations of raw scores with raw reading ease over all units of both
/// levels, without the pairing that controls for content.
pub fn evaluate_uncontrolled(
    scores: &ScoreTable,
    ease: &EaseTable,
    units: &[&str],
    method: &str,
    key: EaseKey,
    granularity: Granularity,
    cfg: &EvalConfig,
) -> CorrelationResult {
    let (x, y): (Vec<f64>, Vec<f64>) = units
        .iter()
        .filter_map(|u| Some((scores.get(method, u)?, ease.value(&key, u)?)))
        .unzip();
    let cell = Cell {
        method: method.to_string(),
        key,
        granularity,
    };
    cell.evaluate(&x, &y, cfg, "uncontrolled")
}

pub fn run_eval(inputs: &EvalInputs, cfg: &EvalConfig) -> Result<EvalReport> {
    if inputs.ease.is_empty() {
        return Err(Error::NoTrials("no reading-ease data".into()));
    }
    if inputs.methods.is_empty() || inputs.measures.is_empty() || inputs.filters.is_empty() {
        return Err(Error::Config(
            "evaluation needs methods, measures and filters".into(),
        ));
    }
    let method_ids: Vec<String> = inputs.methods.iter().map(|m| m.id.clone()).collect();
    let method_refs: Vec<&str> = method_ids.iter().map(String::as_str).collect();
    let keys: Vec<EaseKey> = inputs
        .filters
        .iter()
        .flat_map(|&filter| {
            inputs
                .measures
                .iter()
                .map(move |&measure| EaseKey { measure, filter })
        })
        .collect();

    let mut by_gran: Vec<(Granularity, Vec<DeltaRecord>, Vec<&str>)> = Vec::new();
    let mut audit = Vec::new();
    for &g in &inputs.granularities {
        let pairs: Vec<&ParallelPair> = inputs.corpus.pairs_at(g).collect();
        if pairs.is_empty() {
            return Err(Error::InvalidInput(format!("no {g} pairs in corpus")));
        }
        let (records, a) = compute_deltas(&pairs, inputs.scores, &method_refs, inputs.ease, &keys);
        audit.extend(a);
        let units: BTreeSet<&str> = pairs
            .iter()
            .flat_map(|p| [p.original.as_str(), p.simplified.as_str()])
            .collect();
        by_gran.push((g, records, units.into_iter().collect()));
    }
    if !audit.is_empty() {
        tracing::warn!(entries = audit.len(), "pairs dropped from some delta vectors");
    }

    let mut cells = Vec::new();
    for (gi, (g, _, _)) in by_gran.iter().enumerate() {
        for key in &keys {
            for m in &method_ids {
                cells.push((
                    gi,
                    Cell {
                        method: m.clone(),
                        key: *key,
                        granularity: *g,
                    },
                ));
            }
        }
    }

    let results: Vec<CorrelationResult> = cells
        .par_iter()
        .map(|(gi, cell)| {
            let cols = complete(
                &by_gran[*gi].1,
                &[Var::Score(cell.method.clone()), Var::Ease(cell.key)],
            );
            cell.evaluate(&cols[0], &cols[1], cfg, "controlled")
        })
        .collect();

    let uncontrolled: Vec<CorrelationResult> = if cfg.uncontrolled {
        cells
            .par_iter()
            .map(|(gi, cell)| {
                evaluate_uncontrolled(
                    inputs.scores,
                    inputs.ease,
                    &by_gran[*gi].2,
                    &cell.method,
                    cell.key,
                    cell.granularity,
                    cfg,
                )
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut steiger_grids = Vec::new();
    if cfg.steiger_grid {
        for (g, records, _) in &by_gran {
            for key in &keys {
                steiger_grids.push(steiger_grid(records, &method_ids, *key, *g));
            }
        }
    }

    let mut comparisons = Vec::new();
    for (g, records, _) in &by_gran {
        for &(a, b) in &inputs.comparisons {
            for &measure in &inputs.measures {
                for m in &method_ids {
                    let res = compare_groups(records, m, measure, a, b);
                    comparisons.push(FilterComparison {
                        method: m.clone(),
                        measure,
                        granularity: *g,
                        a,
                        b,
                        tier: res.as_ref().ok().map(|s| Tier::from_p(s.p_value)),
                        error: res.as_ref().err().map(|e| e.to_string()),
                        result: res.ok(),
                    });
                }
            }
        }
    }

    let score_intercorrelations = by_gran
        .iter()
        .map(|(g, records, _)| intercorrelation(records, &method_ids, *g))
        .collect();

    let perplexity_fits = perplexity_fits(inputs, &keys, &results, &uncontrolled);

    Ok(EvalReport {
        seed: cfg.bootstrap.seed,
        resamples: cfg.bootstrap.resamples,
        ci_level: cfg.bootstrap.level,
        p_values: cfg.p_values,
        results,
        uncontrolled,
        steiger_grids,
        comparisons,
        score_intercorrelations,
        perplexity_fits,
        audit,
    })
}

fn perplexity_fits(
    inputs: &EvalInputs,
    keys: &[EaseKey],
    controlled: &[CorrelationResult],
    uncontrolled: &[CorrelationResult],
) -> Vec<PerplexityFit> {
    if inputs.perplexities.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (is_controlled, results) in [(true, controlled), (false, uncontrolled)] {
        if results.is_empty() {
            continue;
        }
        for &g in &inputs.granularities {
            for key in keys {
                let points: Vec<PerplexityPoint> = results
                    .iter()
                    .filter(|r| {
                        r.granularity == g
                            && r.measure == key.measure
                            && r.group == key.filter.group
                            && r.regime == key.filter.regime
                    })
                    .filter_map(|r| {
                        let ppl = *inputs.perplexities.get(&r.method)?;
                        Some(PerplexityPoint {
                            method: r.method.clone(),
                            log_perplexity: ppl.ln(),
                            r: r.pearson?.value,
                        })
                    })
                    .collect();
                let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.log_perplexity, p.r)).collect();
                let fit = fit_r_vs_perplexity(&xy);
                out.push(PerplexityFit {
                    measure: key.measure,
                    granularity: g,
                    group: key.filter.group,
                    regime: key.filter.regime,
                    controlled: is_controlled,
                    points,
                    error: fit.as_ref().err().map(|e| e.to_string()),
                    fit: fit.ok(),
                });
            }
        }
    }
    out
}
