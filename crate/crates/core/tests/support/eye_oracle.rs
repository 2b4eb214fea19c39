//! Straightforward per-fixation re-implementation of the twelve eye measures,
//! used to cross-check the single-pass implementation in the library.
//!
//! Durations are whole milliseconds so every sum is exact in f64 and the two
//! implementations can be compared with `==` regardless of summation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use readease_core::eye::{trial_measures, Fixation, Group, Measure, Regime, Trial};
use readease_core::Level;

/// First-pass status of fixation `i`, read literally off the definition:
/// every fixation from the word's first entry through `i` is on the word, and
/// nothing before `i` landed further right.
fn is_first_pass(words: &[usize], i: usize) -> bool {
    let w = words[i];
    let entry = words.iter().position(|&x| x == w).unwrap();
    words[entry..=i].iter().all(|&x| x == w) && words[..i].iter().all(|&x| x <= w)
}

fn avg(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn oracle(trial: &Trial) -> [Option<f64>; 12] {
    let n = trial.n_words;
    let nf = n as f64;
    let words: Vec<usize> = trial.fixations.iter().map(|f| f.word).collect();
    let durs: Vec<f64> = trial.fixations.iter().map(|f| f.duration).collect();
    let wref = &words;
    let on = |w: usize| (0..wref.len()).filter(move |&i| wref[i] == w);
    let fixated: Vec<usize> = (0..n).filter(|&w| on(w).next().is_some()).collect();
    let first_pass: Vec<bool> = (0..words.len()).map(|i| is_first_pass(&words, i)).collect();
    let regressions: Vec<usize> = (1..words.len()).filter(|&i| words[i] < words[i - 1]).collect();

    let tf: Vec<f64> = fixated.iter().map(|&w| on(w).map(|i| durs[i]).sum()).collect();
    let ff: Vec<f64> = fixated.iter().map(|&w| durs[on(w).next().unwrap()]).collect();
    let gd: Vec<f64> = fixated
        .iter()
        .map(|&w| {
            let entry = on(w).next().unwrap();
            (entry..words.len())
                .take_while(|&i| words[i] == w)
                .map(|i| durs[i])
                .sum()
        })
        .collect();
    let fp_words: Vec<usize> = (0..n).filter(|&w| on(w).any(|i| first_pass[i])).collect();
    let fpgd: Vec<f64> = fp_words
        .iter()
        .map(|&w| on(w).filter(|&i| first_pass[i]).map(|i| durs[i]).sum())
        .collect();
    let any = !words.is_empty();
    let higher: f64 = (0..words.len())
        .filter(|&i| !first_pass[i])
        .map(|i| durs[i])
        .sum();

    let mut out = [None; 12];
    let mut set = |m: Measure, v: Option<f64>| out[Measure::ALL.iter().position(|&x| x == m).unwrap()] = v;
    set(Measure::Tf, avg(&tf));
    set(Measure::Sr, Some((n - fixated.len()) as f64 / nf));
    set(Measure::Rr, Some(regressions.len() as f64 / nf));
    set(Measure::Ff, avg(&ff));
    set(Measure::Fd, avg(&durs));
    set(Measure::Nf, Some(words.len() as f64 / nf));
    set(Measure::FpGd, avg(&fpgd));
    set(Measure::FpSr, Some((n - fp_words.len()) as f64 / nf));
    set(
        Measure::FpRr,
        Some(regressions.iter().filter(|&&i| first_pass[i - 1]).count() as f64 / nf),
    );
    set(Measure::Gd, avg(&gd));
    set(Measure::HpFd, any.then(|| higher / nf));
    set(
        Measure::Rs,
        (trial.total_time > 0.0).then(|| 1000.0 * nf / trial.total_time),
    );
    out
}

/// Random trial with at most 10 words and 15 fixations.
pub fn random_trial(rng: &mut ChaCha8Rng) -> Trial {
    let n = rng.random_range(1..=10);
    let k = rng.random_range(0..=15);
    let mut w = rng.random_range(0..n);
    let fixations = (0..k)
        .map(|_| {
            // mostly forward movement with refixations and regressions
            w = match rng.random_range(0..10) {
                0..=4 => (w + rng.random_range(1..=2)).min(n - 1),
                5..=6 => w,
                _ => rng.random_range(0..n),
            };
            Fixation {
                word: w,
                duration: rng.random_range(50..=600) as f64,
            }
        })
        .collect();
    let total_time = if rng.random_bool(0.1) {
        0.0
    } else {
        rng.random_range(500..=6000) as f64
    };
    Trial::new(
        "p",
        "u",
        Level::Original,
        Regime::Ordinary,
        Group::L1,
        n,
        fixations,
        total_time,
    )
    .expect("valid random trial")
}

/// Trials on which library and oracle disagree, as (seed index, measure).
pub fn mismatches(seed: u64, trials: usize) -> Vec<(usize, Measure)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    for t in 0..trials {
        let trial = random_trial(&mut rng);
        let got = trial_measures(&trial);
        let want = oracle(&trial);
        for (m, w) in Measure::ALL.iter().zip(want) {
            if got.get(*m) != w {
                bad.push((t, *m));
            }
        }
    }
    bad
}

/// The hand-traced example: 3 words, fixations w0 w1 w0 w2.
pub fn hand_example() -> Trial {
    let fix = [(0, 200.0), (1, 150.0), (0, 100.0), (2, 250.0)]
        .iter()
        .map(|&(word, duration)| Fixation { word, duration })
        .collect();
    Trial::new(
        "p",
        "u",
        Level::Original,
        Regime::Ordinary,
        Group::L1,
        3,
        fix,
        1200.0,
    )
    .unwrap()
}

/// (measure, computed, expected) for the hand-traced example.
pub fn hand_example_checks() -> Vec<(Measure, Option<f64>, f64)> {
    let m = trial_measures(&hand_example());
    [
        (Measure::Tf, 700.0 / 3.0),
        (Measure::Sr, 0.0),
        (Measure::Rr, 1.0 / 3.0),
        (Measure::Ff, 200.0),
        (Measure::Nf, 4.0 / 3.0),
        (Measure::FpGd, 200.0),
        (Measure::FpSr, 0.0),
        (Measure::HpFd, 100.0 / 3.0),
    ]
    .into_iter()
    .map(|(k, v)| (k, m.get(k), v))
    .collect()
}
