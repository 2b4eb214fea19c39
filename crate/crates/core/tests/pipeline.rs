mod support;

use std::collections::BTreeMap;

use readease_core::eval::{run_eval, EvalConfig, EvalInputs};
use readease_core::eye::{ingest_fixations, EaseTable, Group, Measure, TrialFilter};
use readease_core::formulas::EasyWords;
use readease_core::measures::{ingest_unit_scores, MeasureStoreBuilder};
use readease_core::registry::Registry;
use readease_core::scoring::Scorer;
use readease_core::{Corpus, Granularity, TextUnit};

const METHODS: [&str; 5] = [
    "flesch_kincaid",
    "word_length",
    "surprisal",
    "pll",
    "idea_density",
];

fn run(dir: &std::path::Path, seed: u64) -> String {
    let data = support::synth::write_dataset(dir, 42, 30);
    let corpus = Corpus::load(&data.corpus).unwrap();
    let mut builder = MeasureStoreBuilder::new(&corpus);
    builder
        .ingest_word_measures("default", &data.word_measures)
        .unwrap();
    let store = builder.seal();
    let external = BTreeMap::from([(
        "idea_density".to_string(),
        ingest_unit_scores(&data.unit_scores, "idea_density")
            .unwrap()
            .into_iter()
            .map(|s| (s.unit_id, s.value))
            .collect(),
    )]);
    let easy = EasyWords::builtin();
    let reg = Registry::builtin();
    let methods = reg.select(&METHODS).unwrap();
    let grans = [Granularity::Sentence, Granularity::Passage];
    let units: Vec<&TextUnit> = grans.iter().flat_map(|g| corpus.paired_units(*g)).collect();
    let scorer = Scorer {
        corpus: &corpus,
        easy_words: &easy,
        store: &store,
        external: &external,
    };
    let scores = scorer.score_table(&methods, &units).unwrap();

    let trials = ingest_fixations(&data.fixations, &corpus).unwrap();
    let l1 = TrialFilter {
        group: Some(Group::L1),
        regime: None,
    };
    let l2 = TrialFilter {
        group: Some(Group::L2),
        regime: None,
    };
    let filters = [TrialFilter::default(), l1, l2];
    let ease = EaseTable::build(&trials, &units, &Measure::MAIN, &filters);

    let inputs = EvalInputs {
        corpus: &corpus,
        methods,
        scores: &scores,
        ease: &ease,
        measures: Measure::MAIN.to_vec(),
        granularities: grans.to_vec(),
        filters: filters.to_vec(),
        comparisons: vec![(l1, l2)],
        perplexities: BTreeMap::new(),
    };
    let mut cfg = EvalConfig::default();
    cfg.bootstrap.seed = seed;
    let report = run_eval(&inputs, &cfg).unwrap();

    assert_eq!(report.results.len(), METHODS.len() * 3 * 2 * filters.len());
    assert_eq!(report.comparisons.len(), METHODS.len() * 3 * 2);
    assert_eq!(report.steiger_grids.len(), 3 * 2 * filters.len());
    let tf_len = report
        .results
        .iter()
        .find(|r| {
            r.method == "word_length"
                && r.measure == Measure::Tf
                && r.granularity == Granularity::Passage
                && r.group.is_none()
        })
        .unwrap();
    assert_eq!(tf_len.n, 30);
    let p = tf_len.pearson.unwrap();
    assert!(p.value > 0.3, "word length vs TF r = {}", p.value);
    assert!(p.ci_low <= p.value && p.value <= p.ci_high);
    serde_json::to_string_pretty(&report).unwrap()
}

#[test]
fn evaluation_is_deterministic_and_shaped() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = run(a.path(), 3);
    let second = run(b.path(), 3);
    assert_eq!(first, second);
    assert_ne!(first, run(a.path(), 4));
}
