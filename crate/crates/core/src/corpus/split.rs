//! Seeded train/test split over pair occurrences, and k-fold partitioning.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use super::{CorpusError, Pair, PairCorpus};
use crate::rng::{substream, Substream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub fold_count: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.8,
            fold_count: 5,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<(), CorpusError> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(CorpusError::Config(format!(
                "train fraction {} outside (0, 1)",
                self.train_fraction
            )));
        }
        if self.fold_count < 2 {
            return Err(CorpusError::Config(format!(
                "fold count {} must be at least 2",
                self.fold_count
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitOutcome {
    pub train: PairCorpus,
    /// Held-out occurrences whose pair type never occurs in `train`.
    pub test: Vec<Pair>,
    /// Held-out occurrences discarded because their type was seen in training.
    pub discarded_seen: usize,
}

/// Shuffles every pair occurrence with the split substream, keeps the first
/// `round(N * train_fraction)` for training and the rest as test candidates,
/// then drops test occurrences whose type appears in training.
pub fn split_unseen_test(corpus: &PairCorpus, spec: &SplitSpec) -> Result<SplitOutcome, CorpusError> {
    spec.validate()?;
    if corpus.is_empty() {
        return Err(CorpusError::Config("cannot split an empty corpus".into()));
    }
    let mut occurrences: Vec<Pair> = Vec::with_capacity(corpus.total_pairs() as usize);
    for (pair, c) in corpus.entries() {
        occurrences.extend(std::iter::repeat_n(pair, c as usize));
    }
    let mut rng = substream(spec.seed, Substream::Split);
    occurrences.shuffle(&mut rng);

    let n = occurrences.len();
    let n_train = ((n as f64) * spec.train_fraction).round().clamp(0.0, n as f64) as usize;
    let (train_occ, test_occ) = occurrences.split_at(n_train);

    let train = corpus.with_counts(train_occ.iter().map(|&p| (p, 1)));
    let seen: HashSet<Pair> = train.entries().map(|(p, _)| p).collect();
    let test: Vec<Pair> = test_occ.iter().copied().filter(|p| !seen.contains(p)).collect();
    let discarded_seen = test_occ.len() - test.len();
    Ok(SplitOutcome {
        train,
        test,
        discarded_seen,
    })
}

/// Partitions `items` into `k` folds after a seeded shuffle. Fold sizes
/// differ by at most one; the remainder goes to the lowest-indexed folds.
pub fn make_folds<I: Clone>(items: &[I], k: usize, seed: u64) -> Result<Vec<Vec<I>>, CorpusError> {
    if k < 2 {
        return Err(CorpusError::Config(format!("fold count {k} must be at least 2")));
    }
    if items.len() < k {
        return Err(CorpusError::Config(format!(
            "{} test items cannot fill {k} folds",
            items.len()
        )));
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut substream(seed, Substream::Folds));
    let base = items.len() / k;
    let extra = items.len() % k;
    let mut folds = Vec::with_capacity(k);
    let mut cursor = 0;
    for i in 0..k {
        let size = base + usize::from(i < extra);
        folds.push(order[cursor..cursor + size].iter().map(|&j| items[j].clone()).collect());
        cursor += size;
    }
    Ok(folds)
}
