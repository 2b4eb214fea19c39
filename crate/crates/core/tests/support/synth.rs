//! Synthetic parallel corpus with eye-tracking and word-measure files.
//!
//! Reading times grow with word length and simplified sentences swap long
//! words for short ones, so length-sensitive methods track reading ease.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::formula_oracle::VOCAB;

pub struct Dataset {
    pub corpus: PathBuf,
    pub fixations: PathBuf,
    pub word_measures: PathBuf,
    pub unit_scores: PathBuf,
    pub paragraphs: usize,
    pub sentences_per_paragraph: usize,
}

const PARTICIPANTS: [(&str, &str, &str); 8] = [
    ("s1", "L1", "ordinary"),
    ("s2", "L1", "ordinary"),
    ("s3", "L1", "info_seeking"),
    ("s4", "L1", "info_seeking"),
    ("s5", "L2", "ordinary"),
    ("s6", "L2", "ordinary"),
    ("s7", "L2", "info_seeking"),
    ("s8", "L2", "info_seeking"),
];

fn sentence(words: &[&str]) -> String {
    let mut s = words.join(" ");
    s[..1].make_ascii_uppercase();
    s + "."
}

/// Writes the dataset into `dir` and returns the file paths.
pub fn write_dataset(dir: &Path, seed: u64, paragraphs: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let short: Vec<&str> = VOCAB.iter().filter(|(_, s)| *s == 1).map(|(w, _)| *w).collect();
    let per_par = 3;

    let mut pars = Vec::new();
    // (unit_id, words) for every passage
    let mut passages: Vec<(String, Vec<String>)> = Vec::new();
    for p in 0..paragraphs {
        let mut orig = Vec::new();
        let mut simp = Vec::new();
        for _ in 0..per_par {
            let len = rng.random_range(6..=12);
            let o: Vec<&str> = (0..len).map(|_| VOCAB.choose(&mut rng).unwrap().0).collect();
            let keep = rng.random_range(0.3..0.9);
            let mut s: Vec<&str> = Vec::new();
            for w in &o {
                if !rng.random_bool(0.85) {
                    continue;
                }
                s.push(if w.len() > 5 && rng.random_bool(keep) {
                    short.choose(&mut rng).unwrap()
                } else {
                    w
                });
            }
            let s = if s.len() < 2 { o[..2].to_vec() } else { s };
            orig.push(sentence(&o));
            simp.push(sentence(&s));
        }
        for (level, sents) in [("original", &orig), ("simplified", &simp)] {
            let words = sents
                .iter()
                .flat_map(|s| s.split_whitespace().map(str::to_string))
                .collect();
            passages.push((format!("syn/p{p}/{level}"), words));
        }
        pars.push(serde_json::json!({
            "paragraph_id": format!("p{p}"),
            "original": orig,
            "simplified": simp,
            "alignment": (0..per_par).map(|i| [i, i]).collect::<Vec<_>>(),
        }));
    }
    let corpus = serde_json::json!({"articles": [{"article_id": "syn", "paragraphs": pars}]});
    let corpus_path = dir.join("corpus.json");
    std::fs::write(&corpus_path, serde_json::to_string_pretty(&corpus).unwrap()).unwrap();

    let letters = |w: &str| w.chars().filter(|c| c.is_alphanumeric()).count() as i64;

    let mut fix = String::from(
        "participant_id,unit_id,level,regime,group,order,word_index,duration_ms,total_time_ms\n",
    );
    for (pid, group, regime) in PARTICIPANTS {
        let slow = if group == "L2" { 40 } else { 0 };
        for (unit_id, words) in &passages {
            let level = unit_id.rsplit('/').next().unwrap();
            let mut events: Vec<(usize, i64)> = Vec::new();
            for (i, w) in words.iter().enumerate() {
                if letters(w) <= 3 && rng.random_bool(0.2) {
                    continue;
                }
                let d = 120 + slow + 30 * letters(w) + rng.random_range(0..80);
                events.push((i, d));
                if i > 0 && rng.random_bool(0.05) {
                    events.push((i - 1, 100 + rng.random_range(0..60)));
                    events.push((i, 90 + rng.random_range(0..60)));
                }
            }
            let total: i64 = events.iter().map(|e| e.1 + 25).sum();
            for (order, (w, d)) in events.iter().enumerate() {
                writeln!(
                    fix,
                    "{pid},{unit_id},{level},{regime},{group},{order},{w},{d},{total}"
                )
                .unwrap();
            }
        }
    }
    let fix_path = dir.join("fixations.csv");
    std::fs::write(&fix_path, fix).unwrap();

    let mut wm = String::from("unit_id\tword_index\tsurface\tsurprisal_bits\tentropy_bits\tpll\n");
    for (unit_id, words) in &passages {
        for (i, w) in words.iter().enumerate() {
            let s = 2.0 + 0.8 * letters(w) as f64 + rng.random_range(0.0..2.0);
            let e = 3.0 + rng.random_range(0.0..1.5);
            let pll = -(1.0 + 0.5 * letters(w) as f64 + rng.random_range(0.0..1.0));
            writeln!(wm, "{unit_id}\t{i}\t{w}\t{s:.4}\t{e:.4}\t{pll:.4}").unwrap();
        }
    }
    let wm_path = dir.join("word_measures.tsv");
    std::fs::write(&wm_path, wm).unwrap();

    let mut us = String::from("unit_id,value\n");
    for (unit_id, words) in &passages {
        let v = words.len() as f64 * 0.1 + rng.random_range(0.0..1.0);
        writeln!(us, "{unit_id},{v:.4}").unwrap();
    }
    let us_path = dir.join("idea_density.csv");
    std::fs::write(&us_path, us).unwrap();

    Dataset {
        corpus: corpus_path,
        fixations: fix_path,
        word_measures: wm_path,
        unit_scores: us_path,
        paragraphs,
        sentences_per_paragraph: per_par,
    }
}
