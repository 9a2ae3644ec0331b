use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{EvalError, PseudoWordMap};
use crate::corpus::{NounId, Pair, PairCorpus, VerbId};
use crate::scalar::Real;

/// A noun with the verb it really occurred with and the pseudo-word partner
/// that acts as decoy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Trial {
    pub noun: NounId,
    pub correct: VerbId,
    pub decoy: VerbId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    Correct,
    Incorrect,
    Tie,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome<T> {
    pub trial: Trial,
    pub decision: Decision,
    /// `(correct, decoy)` scores.
    pub scores: (T, T),
}

/// Scores both verbs of the pseudo-word. Exactly equal scores are a tie.
pub fn run_trial<T, F>(trial: Trial, mut scorer: F) -> Result<TrialOutcome<T>, EvalError>
where
    T: Real,
    F: FnMut(NounId, VerbId) -> Result<T, EvalError>,
{
    let attach = |verb: VerbId| {
        move |e: EvalError| EvalError::Trial {
            noun: trial.noun,
            verb,
            source: Box::new(e),
        }
    };
    let a = scorer(trial.noun, trial.correct).map_err(attach(trial.correct))?;
    let b = scorer(trial.noun, trial.decoy).map_err(attach(trial.decoy))?;
    let decision = if a > b {
        Decision::Correct
    } else if a < b {
        Decision::Incorrect
    } else {
        Decision::Tie
    };
    Ok(TrialOutcome {
        trial,
        decision,
        scores: (a, b),
    })
}

/// Trial tallies; the error rate is derived from them exactly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorCounts {
    pub n: u64,
    pub incorrect: u64,
    pub ties: u64,
}

impl ErrorCounts {
    pub fn record(&mut self, d: Decision) {
        self.n += 1;
        match d {
            Decision::Correct => {}
            Decision::Incorrect => self.incorrect += 1,
            Decision::Tie => self.ties += 1,
        }
    }

    pub fn merge(self, other: ErrorCounts) -> ErrorCounts {
        ErrorCounts {
            n: self.n + other.n,
            incorrect: self.incorrect + other.incorrect,
            ties: self.ties + other.ties,
        }
    }

    /// `(incorrect + ties / 2) / n` as an exact fraction.
    pub fn exact_rate(&self) -> Option<Ratio<u64>> {
        (self.n > 0).then(|| Ratio::new(2 * self.incorrect + self.ties, 2 * self.n))
    }

    /// Correctly rounded error rate.
    pub fn rate(&self) -> Option<f64> {
        // one division of two exactly representable integers
        (self.n > 0).then(|| (2 * self.incorrect + self.ties) as f64 / (2 * self.n) as f64)
    }
}

pub fn error_rate<T>(outcomes: &[TrialOutcome<T>]) -> Result<f64, EvalError> {
    let mut counts = ErrorCounts::default();
    for o in outcomes {
        counts.record(o.decision);
    }
    counts
        .rate()
        .ok_or_else(|| EvalError::Config("error rate of an empty outcome list".into()))
}

/// Test pairs turned into trials, with what was filtered out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialSet {
    pub trials: Vec<Trial>,
    /// Verb has no pseudo-word partner (no training count, or the odd one out).
    pub skipped_uncovered: usize,
    /// The decoy pair occurs in training, so the trial is not all-unseen.
    pub skipped_seen_decoy: usize,
    /// The noun has no training count in at least one base corpus.
    pub skipped_undefined_noun: usize,
}

/// Keeps test occurrences whose verb has a partner, whose decoy pair is
/// unseen in `train`, and whose noun has a defined row in every corpus of
/// `base_corpora`. Input order is preserved.
pub fn build_trials(test: &[Pair], map: &PseudoWordMap, train: &PairCorpus, base_corpora: &[&PairCorpus]) -> TrialSet {
    let mut set = TrialSet {
        trials: Vec::with_capacity(test.len()),
        skipped_uncovered: 0,
        skipped_seen_decoy: 0,
        skipped_undefined_noun: 0,
    };
    for p in test {
        let Some(decoy) = map.partner(p.verb) else {
            set.skipped_uncovered += 1;
            continue;
        };
        if train.is_seen(p.noun, decoy) {
            set.skipped_seen_decoy += 1;
            continue;
        }
        if base_corpora.iter().any(|c| c.noun_total(p.noun) == 0) {
            set.skipped_undefined_noun += 1;
            continue;
        }
        set.trials.push(Trial {
            noun: p.noun,
            correct: p.verb,
            decoy,
        });
    }
    set
}
