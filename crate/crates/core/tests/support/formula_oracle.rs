//! Spreadsheet-style recomputation of the six formulas from a hand-counted
//! vocabulary, independent of the library's tokenizer and syllable counter.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use readease_core::formulas::{EasyWords, Formula, TextCounts};
use readease_core::{Corpus, Level};

/// Words with syllable counts counted by hand.
pub const VOCAB: &[(&str, usize)] = &[
    ("the", 1),
    ("cat", 1),
    ("sat", 1),
    ("on", 1),
    ("mat", 1),
    ("dog", 1),
    ("ran", 1),
    ("big", 1),
    ("red", 1),
    ("and", 1),
    ("a", 1),
    ("is", 1),
    ("go", 1),
    ("happy", 2),
    ("garden", 2),
    ("river", 2),
    ("window", 2),
    ("yellow", 2),
    ("under", 2),
    ("pencil", 2),
    ("quickly", 2),
    ("banana", 3),
    ("animal", 3),
    ("tomato", 3),
    ("elephant", 3),
    ("umbrella", 3),
    ("computer", 3),
    ("hospital", 3),
    ("fantastic", 3),
    ("information", 4),
    ("education", 4),
];

pub const EASY: &[&str] = &[
    "the", "cat", "sat", "on", "mat", "dog", "ran", "big", "red", "and", "a", "is", "go", "happy", "garden",
    "river", "window", "yellow",
];

pub fn easy_words() -> EasyWords {
    EasyWords::from_words(EASY.iter().copied()).expect("non-empty list")
}

/// A passage as sentences of vocabulary indices.
#[derive(Debug, Clone)]
pub struct SyntheticUnit {
    pub sentences: Vec<Vec<usize>>,
}

impl SyntheticUnit {
    fn words(&self) -> impl Iterator<Item = (&'static str, usize)> + '_ {
        self.sentences.iter().flatten().map(|&i| VOCAB[i])
    }

    /// Sentences with the first word capitalized and a final period.
    fn sentence_texts(&self) -> Vec<String> {
        self.sentences
            .iter()
            .map(|s| {
                let mut words: Vec<String> = s.iter().map(|&i| VOCAB[i].0.to_string()).collect();
                let first = &mut words[0];
                *first = first[..1].to_uppercase() + &first[1..];
                words.join(" ") + "."
            })
            .collect()
    }
}

pub fn synthetic_units(seed: u64, n: usize) -> Vec<SyntheticUnit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx: Vec<usize> = (0..VOCAB.len()).collect();
    (0..n)
        .map(|_| SyntheticUnit {
            sentences: (0..rng.random_range(1..=6))
                .map(|_| {
                    (0..rng.random_range(3..=15))
                        .map(|_| *idx.choose(&mut rng).unwrap())
                        .collect()
                })
                .collect(),
        })
        .collect()
}

/// A corpus with one paragraph per synthetic unit, as original passages.
pub fn corpus_of(units: &[SyntheticUnit]) -> Corpus {
    let paragraphs: Vec<serde_json::Value> = units
        .iter()
        .enumerate()
        .map(|(i, u)| {
            serde_json::json!({
                "paragraph_id": format!("p{i}"),
                "original": u.sentence_texts(),
                "simplified": ["A cat sat."],
                "alignment": [[0, 0]],
            })
        })
        .collect();
    let doc = serde_json::json!({"articles": [{"article_id": "syn", "paragraphs": paragraphs}]});
    Corpus::from_json(&doc.to_string()).expect("synthetic corpus")
}

pub fn expected(formula: Formula, unit: &SyntheticUnit) -> f64 {
    let words = unit.words().count() as f64;
    let sentences = unit.sentences.len() as f64;
    let syllables = unit.words().map(|(_, s)| s).sum::<usize>() as f64;
    let letters = unit.words().map(|(w, _)| w.len()).sum::<usize>() as f64;
    let complex = unit.words().filter(|(_, s)| *s >= 3).count() as f64;
    let difficult = unit.words().filter(|(w, _)| !EASY.contains(w)).count() as f64;
    match formula {
        Formula::FleschRe => 206.836 - 84.6 * (syllables / words) - 1.015 * (words / sentences),
        Formula::DaleChall => 0.1579 * (difficult / words * 100.0) + 0.0496 * (words / sentences) + 3.6365,
        Formula::GunningFog => 0.4 * (words / sentences + 100.0 * complex / words),
        Formula::Ari => 4.71 * (letters / words) + 0.5 * (words / sentences) - 21.43,
        Formula::ColemanLiau => {
            0.0588 * (letters / words * 100.0) - 0.296 * (sentences / words * 100.0) - 15.8
        }
        Formula::FleschKincaid => 0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59,
    }
}

/// Largest absolute deviation between library and oracle over `n` units.
pub fn max_deviation(seed: u64, n: usize) -> f64 {
    let units = synthetic_units(seed, n);
    let corpus = corpus_of(&units);
    let easy = easy_words();
    let passages: Vec<_> = corpus.passages(Level::Original).collect();
    assert_eq!(passages.len(), n);
    let mut worst: f64 = 0.0;
    for (u, p) in units.iter().zip(passages) {
        for f in Formula::ALL {
            let got = readease_core::formulas::score_unit(f, p, Some(&easy))
                .expect("scorable unit")
                .value;
            worst = worst.max((got - expected(f, u)).abs());
        }
    }
    worst
}

/// Worked examples: (label, computed, expected, tolerance).
pub fn worked_examples() -> Vec<(&'static str, f64, f64, f64)> {
    let corpus = Corpus::from_json(
        r#"{"articles": [{"article_id": "w", "paragraphs": [
            {"paragraph_id": "cat", "original": ["The cat sat on the mat."],
             "simplified": ["The cat sat."], "alignment": [[0, 0]]}]}]}"#,
    )
    .unwrap();
    let cat = corpus.unit("w/cat/original").unwrap();
    let easy = easy_words();
    let on_cat = |f: Formula| {
        readease_core::formulas::score_unit(f, cat, Some(&easy))
            .unwrap()
            .value
    };
    let counts = |words, sentences, syllables, letters, complex, difficult| TextCounts {
        words,
        sentences,
        syllables,
        letters,
        complex_words: complex,
        difficult_words: Some(difficult),
    };
    let apply = |f: Formula, c: TextCounts| f.apply(&c).unwrap();
    vec![
        ("flesch_re cat sentence", on_cat(Formula::FleschRe), 116.146, 1e-9),
        (
            "flesch_re unit ratios",
            apply(Formula::FleschRe, counts(1, 1, 1, 3, 0, 0)),
            121.221,
            1e-9,
        ),
        ("dale_chall all easy", on_cat(Formula::DaleChall), 3.9341, 1e-9),
        (
            "dale_chall all difficult",
            apply(Formula::DaleChall, counts(10, 1, 10, 40, 0, 10)),
            19.9225,
            1e-9,
        ),
        ("gunning_fog cat sentence", on_cat(Formula::GunningFog), 2.4, 1e-9),
        (
            "gunning_fog half complex",
            apply(Formula::GunningFog, counts(10, 1, 20, 50, 5, 0)),
            24.0,
            1e-9,
        ),
        ("ari cat sentence", on_cat(Formula::Ari), -5.085, 1e-9),
        (
            "ari chars 5 words 20",
            apply(Formula::Ari, counts(20, 1, 20, 100, 0, 0)),
            12.12,
            1e-9,
        ),
        (
            "coleman_liau cat sentence",
            on_cat(Formula::ColemanLiau),
            -4.073,
            5e-4,
        ),
        (
            "coleman_liau L 500 S 5",
            apply(Formula::ColemanLiau, counts(20, 1, 20, 100, 0, 0)),
            12.12,
            1e-9,
        ),
        (
            "flesch_kincaid cat sentence",
            on_cat(Formula::FleschKincaid),
            -1.45,
            1e-9,
        ),
        (
            "flesch_kincaid 20 and 1.5",
            apply(Formula::FleschKincaid, counts(20, 1, 30, 80, 0, 0)),
            9.91,
            1e-9,
        ),
    ]
}
