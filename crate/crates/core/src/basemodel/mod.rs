//! Base language models: maximum likelihood and Katz back-off.
//!
//! Both answer `P(v | n)` for a noun row and the unigram probabilities of
//! either side. Rows with `c(n) = 0` are undefined and queries on them fail.

mod katz;
mod mle;
mod summary;

pub use katz::{good_turing_count, DiscountTable, KatzModel, RowMode, DEFAULT_GT_CUTOFF};
pub use mle::MleModel;
pub use summary::ModelSummary;

use thiserror::Error;

use crate::corpus::{NounId, PairCorpus, VerbId};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown noun id {0}")]
    UnknownNoun(NounId),
    #[error("unknown verb id {0}")]
    UnknownVerb(VerbId),
    #[error("conditional undefined: noun {0} has zero count")]
    UndefinedConditional(NounId),
    #[error("conditional undefined: verb {0} has zero count")]
    UndefinedReverse(VerbId),
    #[error("unigram undefined on an empty corpus")]
    EmptyCorpus,
    #[error("no usable Good-Turing cutoff at or below {requested}")]
    NoDiscountCutoff { requested: u64 },
}

/// A conditional model `P(v | n)` over a fixed corpus.
pub trait BaseModel<T: Real>: Send + Sync {
    fn corpus(&self) -> &PairCorpus;

    /// `P(v | n)`.
    fn prob(&self, n: NounId, v: VerbId) -> Result<T, ModelError>;

    /// Strictly positive entries of `P(. | n)`, sorted by verb id.
    fn row(&self, n: NounId) -> Result<Vec<(VerbId, T)>, ModelError>;

    /// `P(v) = c(v) / N`.
    fn verb_unigram(&self, v: VerbId) -> Result<T, ModelError> {
        let corpus = self.corpus();
        if !corpus.has_verb(v) {
            return Err(ModelError::UnknownVerb(v));
        }
        if corpus.is_empty() {
            return Err(ModelError::EmptyCorpus);
        }
        Ok(T::from_count(corpus.verb_total(v)) / T::from_count(corpus.total_pairs()))
    }

    /// `P(n) = c(n) / N`.
    fn noun_unigram(&self, n: NounId) -> Result<T, ModelError> {
        let corpus = self.corpus();
        if !corpus.has_noun(n) {
            return Err(ModelError::UnknownNoun(n));
        }
        if corpus.is_empty() {
            return Err(ModelError::EmptyCorpus);
        }
        Ok(T::from_count(corpus.noun_total(n)) / T::from_count(corpus.total_pairs()))
    }

    /// Whether `P(. | n)` is defined.
    fn has_row(&self, n: NounId) -> bool {
        self.corpus().noun_total(n) > 0
    }
}

pub(crate) fn check_row(corpus: &PairCorpus, n: NounId) -> Result<u64, ModelError> {
    if !corpus.has_noun(n) {
        return Err(ModelError::UnknownNoun(n));
    }
    match corpus.noun_total(n) {
        0 => Err(ModelError::UndefinedConditional(n)),
        c => Ok(c),
    }
}

pub(crate) fn check_verb(corpus: &PairCorpus, v: VerbId) -> Result<(), ModelError> {
    if corpus.has_verb(v) {
        Ok(())
    } else {
        Err(ModelError::UnknownVerb(v))
    }
}
