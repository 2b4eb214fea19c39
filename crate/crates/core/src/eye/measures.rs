//! Pass segmentation and the twelve per-trial reading measures.

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use super::Trial;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Measure {
    #[serde(rename = "TF")]
    Tf,
    #[serde(rename = "SR")]
    Sr,
    #[serde(rename = "RR")]
    Rr,
    #[serde(rename = "FF")]
    Ff,
    #[serde(rename = "FD")]
    Fd,
    #[serde(rename = "NF")]
    Nf,
    #[serde(rename = "fpGD")]
    FpGd,
    #[serde(rename = "fpSR")]
    FpSr,
    #[serde(rename = "fpRR")]
    FpRr,
    #[serde(rename = "GD")]
    Gd,
    #[serde(rename = "hpFD")]
    HpFd,
    #[serde(rename = "RS")]
    Rs,
}

impl Measure {
    pub const ALL: [Measure; 12] = [
        Measure::Tf,
        Measure::Sr,
        Measure::Rr,
        Measure::Ff,
        Measure::Fd,
        Measure::Nf,
        Measure::FpGd,
        Measure::FpSr,
        Measure::FpRr,
        Measure::Gd,
        Measure::HpFd,
        Measure::Rs,
    ];

    /// Measures of the main analysis.
    pub const MAIN: [Measure; 3] = [Measure::Tf, Measure::Sr, Measure::Rr];

    pub fn id(self) -> &'static str {
        match self {
            Measure::Tf => "TF",
            Measure::Sr => "SR",
            Measure::Rr => "RR",
            Measure::Ff => "FF",
            Measure::Fd => "FD",
            Measure::Nf => "NF",
            Measure::FpGd => "fpGD",
            Measure::FpSr => "fpSR",
            Measure::FpRr => "fpRR",
            Measure::Gd => "GD",
            Measure::HpFd => "hpFD",
            Measure::Rs => "RS",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownMeasure(s.to_string()))
    }
}

/// All twelve measures of one trial (or one span of it); `None` = undefined.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeasureValues([Option<f64>; 12]);

impl MeasureValues {
    pub fn get(&self, m: Measure) -> Option<f64> {
        self.0[m.index()]
    }

    fn set(&mut self, m: Measure, v: Option<f64>) {
        self.0[m.index()] = v;
    }
}

impl Serialize for MeasureValues {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(12))?;
        for m in Measure::ALL {
            map.serialize_entry(m.id(), &self.get(m))?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pass {
    First,
    Higher,
}

#[derive(Clone, Copy, PartialEq)]
enum WordState {
    Unvisited,
    FirstRun(Pass),
    Left,
}

/// Labels each fixation first-pass or higher-pass.
///
/// A fixation on word `w` is first-pass when it belongs to the first
/// contiguous run of fixations on `w` and no earlier fixation landed on a
/// word to the right of `w`.
pub fn segment_passes(trial: &Trial) -> Vec<Pass> {
    let mut state = vec![WordState::Unvisited; trial.n_words];
    let mut max_seen: Option<usize> = None;
    let mut prev: Option<usize> = None;
    let mut labels = Vec::with_capacity(trial.fixations.len());
    for f in &trial.fixations {
        let w = f.word;
        let label = match state[w] {
            WordState::Unvisited => {
                let pass = if max_seen.is_none_or(|m| m < w) {
                    Pass::First
                } else {
                    Pass::Higher
                };
                state[w] = WordState::FirstRun(pass);
                pass
            }
            WordState::FirstRun(pass) if prev == Some(w) => pass,
            _ => {
                state[w] = WordState::Left;
                Pass::Higher
            }
        };
        labels.push(label);
        max_seen = Some(max_seen.map_or(w, |m| m.max(w)));
        prev = Some(w);
    }
    labels
}

/// Per-word summary of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct WordStats {
    pub fixations: usize,
    /// Summed duration of all fixations on the word.
    pub total: f64,
    pub first_fixation: Option<f64>,
    /// First entry to first exit, regardless of pass.
    pub gaze: f64,
    /// Gaze duration of the first run if it is first-pass.
    pub first_pass_gaze: Option<f64>,
    pub higher_pass: f64,
    /// Regressive saccades launched from this word.
    pub regressions_out: usize,
    /// Regressive saccades launched from a first-pass fixation on this word.
    pub first_pass_regressions_out: usize,
}

pub fn word_stats(trial: &Trial) -> Vec<WordStats> {
    let passes = segment_passes(trial);
    let mut stats = vec![WordStats::default(); trial.n_words];
    let mut closed = vec![false; trial.n_words];
    let fix = &trial.fixations;
    for (i, f) in fix.iter().enumerate() {
        let s = &mut stats[f.word];
        if s.fixations == 0 {
            s.first_fixation = Some(f.duration);
        } else if fix[i - 1].word != f.word {
            closed[f.word] = true;
        }
        s.fixations += 1;
        s.total += f.duration;
        if !closed[f.word] {
            s.gaze += f.duration;
        }
        match passes[i] {
            Pass::First => *s.first_pass_gaze.get_or_insert(0.0) += f.duration,
            Pass::Higher => s.higher_pass += f.duration,
        }
        if let Some(next) = fix.get(i + 1) {
            if next.word < f.word {
                s.regressions_out += 1;
                if passes[i] == Pass::First {
                    s.first_pass_regressions_out += 1;
                }
            }
        }
    }
    stats
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Measures restricted to a set of words, from precomputed [`word_stats`].
///
/// Regressions count toward the word they were launched from. Reading speed
/// needs the trial's total time and is left undefined here.
pub fn span_measures(stats: &[WordStats], words: &[usize]) -> MeasureValues {
    let mut out = MeasureValues::default();
    if words.is_empty() {
        return out;
    }
    let n = words.len() as f64;
    let span: Vec<&WordStats> = words.iter().map(|&w| &stats[w]).collect();
    let fixated: Vec<&&WordStats> = span.iter().filter(|s| s.fixations > 0).collect();
    let n_fix: usize = span.iter().map(|s| s.fixations).sum();
    let any = n_fix > 0;

    out.set(Measure::Tf, mean(fixated.iter().map(|s| s.total)));
    out.set(Measure::Sr, Some((span.len() - fixated.len()) as f64 / n));
    out.set(
        Measure::Rr,
        Some(span.iter().map(|s| s.regressions_out).sum::<usize>() as f64 / n),
    );
    out.set(Measure::Ff, mean(fixated.iter().filter_map(|s| s.first_fixation)));
    out.set(
        Measure::Fd,
        any.then(|| span.iter().map(|s| s.total).sum::<f64>() / n_fix as f64),
    );
    out.set(Measure::Nf, Some(n_fix as f64 / n));
    out.set(Measure::FpGd, mean(span.iter().filter_map(|s| s.first_pass_gaze)));
    out.set(
        Measure::FpSr,
        Some(span.iter().filter(|s| s.first_pass_gaze.is_none()).count() as f64 / n),
    );
    out.set(
        Measure::FpRr,
        Some(span.iter().map(|s| s.first_pass_regressions_out).sum::<usize>() as f64 / n),
    );
    out.set(Measure::Gd, mean(fixated.iter().map(|s| s.gaze)));
    out.set(
        Measure::HpFd,
        any.then(|| span.iter().map(|s| s.higher_pass).sum::<f64>() / n),
    );
    out
}

/// All twelve measures of a whole trial.
pub fn trial_measures(trial: &Trial) -> MeasureValues {
    let stats = word_stats(trial);
    let all: Vec<usize> = (0..trial.n_words).collect();
    let mut out = span_measures(&stats, &all);
    out.set(
        Measure::Rs,
        (trial.total_time > 0.0).then(|| 1000.0 * trial.n_words as f64 / trial.total_time),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eye::{Fixation, Group, Regime};
    use crate::Level;
    use proptest::prelude::*;

    fn trial(n_words: usize, fix: &[(usize, f64)], total_time: f64) -> Trial {
        Trial::new(
            "p",
            "u",
            Level::Original,
            Regime::Ordinary,
            Group::L1,
            n_words,
            fix.iter()
                .map(|&(word, duration)| Fixation { word, duration })
                .collect(),
            total_time,
        )
        .unwrap()
    }

    fn close(a: Option<f64>, b: f64) -> bool {
        a.is_some_and(|a| (a - b).abs() < 1e-9)
    }

    #[test]
    fn hand_traced_example() {
        let t = trial(3, &[(0, 200.0), (1, 150.0), (0, 100.0), (2, 250.0)], 1000.0);
        let m = trial_measures(&t);
        assert!(close(m.get(Measure::Tf), 700.0 / 3.0));
        assert!(close(m.get(Measure::Sr), 0.0));
        assert!(close(m.get(Measure::Rr), 1.0 / 3.0));
        assert!(close(m.get(Measure::Ff), 200.0));
        assert!(close(m.get(Measure::Nf), 4.0 / 3.0));
        assert!(close(m.get(Measure::FpGd), 200.0));
        assert!(close(m.get(Measure::FpSr), 0.0));
        assert!(close(m.get(Measure::HpFd), 100.0 / 3.0));
        assert!(close(m.get(Measure::FpRr), 1.0 / 3.0));
        assert!(close(m.get(Measure::Fd), 175.0));
        assert_eq!(word_stats(&t)[0].gaze, 200.0);
        assert!(close(m.get(Measure::Rs), 3.0));
    }

    #[test]
    fn return_to_word_is_higher_pass() {
        let t = trial(4, &[(1, 1.0), (2, 1.0), (1, 1.0), (3, 1.0)], 0.0);
        assert_eq!(
            segment_passes(&t),
            vec![Pass::First, Pass::First, Pass::Higher, Pass::First]
        );
        let t = trial(3, &[(0, 1.0), (1, 1.0), (2, 1.0)], 0.0);
        assert!(segment_passes(&t).iter().all(|&p| p == Pass::First));
        let t = trial(3, &[(2, 1.0)], 0.0);
        assert_eq!(segment_passes(&t), vec![Pass::First]);
    }

    #[test]
    fn word_first_reached_after_a_later_word_has_no_first_pass() {
        let t = trial(3, &[(0, 100.0), (2, 200.0), (1, 50.0)], 0.0);
        let s = word_stats(&t);
        assert_eq!(s[1].first_pass_gaze, None);
        assert_eq!(s[1].higher_pass, 50.0);
        let m = trial_measures(&t);
        assert!(close(m.get(Measure::FpSr), 1.0 / 3.0));
        assert!(close(m.get(Measure::Sr), 0.0));
    }

    #[test]
    fn skipped_words() {
        let t = trial(3, &[(0, 100.0), (2, 200.0)], 0.0);
        let m = trial_measures(&t);
        assert!(close(m.get(Measure::Sr), 1.0 / 3.0));
        assert!(close(m.get(Measure::Tf), 150.0));
        assert_eq!(m.get(Measure::Rs), None);
    }

    #[test]
    fn single_fixation() {
        let t = trial(1, &[(0, 300.0)], 600.0);
        let m = trial_measures(&t);
        assert!(close(m.get(Measure::Tf), 300.0));
        assert!(close(m.get(Measure::Sr), 0.0));
        assert!(close(m.get(Measure::Rr), 0.0));
        assert!(close(m.get(Measure::Rs), 1000.0 / 600.0));
    }

    #[test]
    fn all_skipped_durations_missing() {
        let t = trial(4, &[], 500.0);
        let m = trial_measures(&t);
        for d in [
            Measure::Tf,
            Measure::Ff,
            Measure::Fd,
            Measure::FpGd,
            Measure::Gd,
            Measure::HpFd,
        ] {
            assert_eq!(m.get(d), None, "{d}");
        }
        assert_eq!(m.get(Measure::Sr), Some(1.0));
        assert_eq!(m.get(Measure::FpSr), Some(1.0));
        assert_eq!(m.get(Measure::Nf), Some(0.0));
    }

    #[test]
    fn measure_ids_roundtrip() {
        for m in Measure::ALL {
            assert_eq!(m.id().parse::<Measure>().unwrap(), m);
        }
        assert!("XX".parse::<Measure>().is_err());
    }

    fn arb_trial() -> impl Strategy<Value = Trial> {
        (1usize..=10).prop_flat_map(|n| {
            prop::collection::vec((0..n, 1u32..500), 0..=15).prop_map(move |fs| {
                let fix: Vec<(usize, f64)> = fs.into_iter().map(|(w, d)| (w, d as f64)).collect();
                trial(n, &fix, 1000.0)
            })
        })
    }

    proptest! {
        #[test]
        fn per_word_invariants(t in arb_trial()) {
            let stats = word_stats(&t);
            for s in &stats {
                let ff = s.first_fixation.unwrap_or(0.0);
                prop_assert!(s.total >= s.gaze && s.gaze >= ff && ff >= 0.0);
                let fp = s.first_pass_gaze.unwrap_or(0.0);
                prop_assert!((fp + s.higher_pass - s.total).abs() < 1e-9);
            }
            let m = trial_measures(&t);
            let sr = m.get(Measure::Sr).unwrap();
            let fixated = stats.iter().filter(|s| s.fixations > 0).count() as f64;
            prop_assert!((sr + fixated / t.n_words as f64 - 1.0).abs() < 1e-12);
            prop_assert!(m.get(Measure::FpSr).unwrap() >= sr);
            let k = t.fixations.len();
            if k > 0 {
                prop_assert!(m.get(Measure::Rr).unwrap() <= (k - 1) as f64 / t.n_words as f64 + 1e-12);
            }
        }

        #[test]
        fn left_to_right_reading(n in 1usize..=10, durs in prop::collection::vec(1u32..500, 10)) {
            let fix: Vec<(usize, f64)> = (0..n).map(|w| (w, durs[w] as f64)).collect();
            let t = trial(n, &fix, 1000.0);
            let m = trial_measures(&t);
            prop_assert_eq!(m.get(Measure::Rr), Some(0.0));
            prop_assert_eq!(m.get(Measure::FpRr), Some(0.0));
            prop_assert_eq!(m.get(Measure::HpFd), Some(0.0));
            prop_assert_eq!(m.get(Measure::Gd), m.get(Measure::FpGd));
        }
    }
}
