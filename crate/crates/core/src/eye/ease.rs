//! Averaging per-trial measures over participants.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::measures::{span_measures, trial_measures, word_stats, Measure, MeasureValues};
use super::{Group, Regime, Trial};
use crate::corpus::{Level, TextUnit};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TrialFilter {
    pub group: Option<Group>,
    pub regime: Option<Regime>,
}

impl TrialFilter {
    pub fn matches(&self, t: &Trial) -> bool {
        self.group.is_none_or(|g| g == t.group) && self.regime.is_none_or(|r| r == t.regime)
    }
}

impl fmt::Display for TrialFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.group.map_or("all", Group::as_str);
        let r = self.regime.map_or("all", Regime::as_str);
        write!(f, "group={g},regime={r}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadingEaseValue {
    pub measure: Measure,
    pub unit_id: String,
    pub level: Level,
    pub value: f64,
    pub n_participants: usize,
}

fn average(values: &[(String, f64)]) -> f64 {
    // fixed participant order before summation
    let mut sorted: Vec<&(String, f64)> = values.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    sorted.iter().map(|(_, v)| v).sum::<f64>() / sorted.len() as f64
}

/// Mean of one measure over the trials that read `unit_id`.
///
/// Trials where the measure is undefined are left out of both the mean and
/// the participant count.
pub fn average_over_participants(
    trials: &[Trial],
    measure: Measure,
    unit_id: &str,
    level: Level,
    filter: TrialFilter,
) -> Result<ReadingEaseValue> {
    let selected: Vec<&Trial> = trials
        .iter()
        .filter(|t| t.unit_id == unit_id && t.level == level && filter.matches(t))
        .collect();
    if selected.is_empty() {
        return Err(Error::NoTrials(format!("{unit_id} ({level}, {filter})")));
    }
    let values: Vec<(String, f64)> = selected
        .iter()
        .filter_map(|t| {
            trial_measures(t)
                .get(measure)
                .map(|v| (t.participant_id.clone(), v))
        })
        .collect();
    if values.is_empty() {
        return Err(Error::NoTrials(format!(
            "{unit_id} ({level}, {filter}): {measure} undefined in every trial"
        )));
    }
    Ok(ReadingEaseValue {
        measure,
        unit_id: unit_id.to_string(),
        level,
        value: average(&values),
        n_participants: values.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EaseKey {
    pub measure: Measure,
    pub filter: TrialFilter,
}

/// Participant-averaged reading ease per measure, filter and unit.
#[derive(Debug, Clone, Default)]
pub struct EaseTable {
    values: BTreeMap<EaseKey, BTreeMap<String, ReadingEaseValue>>,
}

impl EaseTable {
    /// Computes reading ease for `units`.
    ///
    /// A unit is measured from trials on the unit itself or, failing that,
    /// from trials on its parent passage restricted to the unit's words.
    pub fn build(
        trials: &[Trial],
        units: &[&TextUnit],
        measures: &[Measure],
        filters: &[TrialFilter],
    ) -> EaseTable {
        let mut by_unit: HashMap<&str, Vec<usize>> = HashMap::new();
        for (i, t) in trials.iter().enumerate() {
            by_unit.entry(t.unit_id.as_str()).or_default().push(i);
        }
        let stats: Vec<_> = trials.par_iter().map(word_stats).collect();

        let per_unit: Vec<Vec<(usize, MeasureValues)>> = units
            .par_iter()
            .map(|u| {
                if let Some(ids) = by_unit.get(u.unit_id.as_str()) {
                    return ids.iter().map(|&i| (i, trial_measures(&trials[i]))).collect();
                }
                let Some(ids) = u.parent.as_deref().and_then(|p| by_unit.get(p)) else {
                    return Vec::new();
                };
                let words: Vec<usize> = u.passage_word_indices().collect();
                ids.iter()
                    .map(|&i| (i, span_measures(&stats[i], &words)))
                    .collect()
            })
            .collect();

        let mut values: BTreeMap<EaseKey, BTreeMap<String, ReadingEaseValue>> = BTreeMap::new();
        for (u, rows) in units.iter().zip(&per_unit) {
            for &filter in filters {
                for &measure in measures {
                    let vals: Vec<(String, f64)> = rows
                        .iter()
                        .filter(|(i, _)| filter.matches(&trials[*i]))
                        .filter_map(|(i, m)| m.get(measure).map(|v| (trials[*i].participant_id.clone(), v)))
                        .collect();
                    if vals.is_empty() {
                        continue;
                    }
                    values.entry(EaseKey { measure, filter }).or_default().insert(
                        u.unit_id.clone(),
                        ReadingEaseValue {
                            measure,
                            unit_id: u.unit_id.clone(),
                            level: u.level,
                            value: average(&vals),
                            n_participants: vals.len(),
                        },
                    );
                }
            }
        }
        EaseTable { values }
    }

    pub fn insert(&mut self, key: EaseKey, value: ReadingEaseValue) {
        self.values
            .entry(key)
            .or_default()
            .insert(value.unit_id.clone(), value);
    }

    pub fn get(&self, key: &EaseKey, unit_id: &str) -> Option<&ReadingEaseValue> {
        self.values.get(key)?.get(unit_id)
    }

    pub fn value(&self, key: &EaseKey, unit_id: &str) -> Option<f64> {
        self.get(key, unit_id).map(|v| v.value)
    }

    pub fn keys(&self) -> impl Iterator<Item = &EaseKey> {
        self.values.keys()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EaseKey, &ReadingEaseValue)> {
        self.values
            .iter()
            .flat_map(|(k, units)| units.values().map(move |v| (k, v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Corpus;
    use crate::eye::Fixation;

    fn trial(p: &str, group: Group, n: usize, fix: &[(usize, f64)]) -> Trial {
        Trial::new(
            p,
            "u",
            Level::Original,
            Regime::Ordinary,
            group,
            n,
            fix.iter()
                .map(|&(word, duration)| Fixation { word, duration })
                .collect(),
            1000.0,
        )
        .unwrap()
    }

    #[test]
    fn mean_over_participants() {
        let trials = vec![
            trial("a", Group::L1, 1, &[(0, 200.0)]),
            trial("b", Group::L1, 1, &[(0, 300.0)]),
        ];
        let v = average_over_participants(&trials, Measure::Tf, "u", Level::Original, TrialFilter::default())
            .unwrap();
        assert_eq!(v.value, 250.0);
        assert_eq!(v.n_participants, 2);
    }

    #[test]
    fn missing_trials_are_skipped() {
        let trials = vec![
            trial("a", Group::L1, 2, &[]),
            trial("b", Group::L1, 2, &[(0, 180.0)]),
        ];
        let v = average_over_participants(&trials, Measure::Tf, "u", Level::Original, TrialFilter::default())
            .unwrap();
        assert_eq!(v.value, 180.0);
        assert_eq!(v.n_participants, 1);
    }

    #[test]
    fn empty_filter_is_an_error() {
        let trials = vec![trial("a", Group::L1, 1, &[(0, 200.0)])];
        let f = TrialFilter {
            group: Some(Group::L2),
            regime: None,
        };
        assert!(matches!(
            average_over_participants(&trials, Measure::Tf, "u", Level::Original, f),
            Err(Error::NoTrials(_))
        ));
    }

    #[test]
    fn sentence_ease_from_passage_trials() {
        let c = Corpus::from_json(
            r#"{"articles": [{"article_id": "a", "paragraphs": [
                {"paragraph_id": "p", "original": ["One two.", "Three four five."],
                 "simplified": ["One.", "Three."], "alignment": [[0, 0], [1, 1]]}]}]}"#,
        )
        .unwrap();
        let t = Trial::new(
            "s",
            "a/p/original",
            Level::Original,
            Regime::Ordinary,
            Group::L1,
            5,
            [(0, 100.0), (1, 120.0), (2, 200.0), (0, 50.0), (4, 80.0)]
                .iter()
                .map(|&(word, duration)| Fixation { word, duration })
                .collect(),
            2000.0,
        )
        .unwrap();
        let units: Vec<&TextUnit> = c.units().iter().filter(|u| u.level == Level::Original).collect();
        let table = EaseTable::build(&[t], &units, &Measure::ALL, &[TrialFilter::default()]);
        let key = |measure| EaseKey {
            measure,
            filter: TrialFilter::default(),
        };
        assert_eq!(table.value(&key(Measure::Tf), "a/p/original/0"), Some(135.0));
        assert_eq!(table.value(&key(Measure::Sr), "a/p/original/1"), Some(1.0 / 3.0));
        // the regression 2 -> 0 is launched from sentence 1
        assert_eq!(table.value(&key(Measure::Rr), "a/p/original/1"), Some(1.0 / 3.0));
        assert_eq!(table.value(&key(Measure::Rr), "a/p/original/0"), Some(0.0));
        assert_eq!(table.value(&key(Measure::Rs), "a/p/original/0"), None);
        assert_eq!(table.value(&key(Measure::Rs), "a/p/original"), Some(2.5));
    }
}
