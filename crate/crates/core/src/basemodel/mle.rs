use std::marker::PhantomData;
use std::sync::Arc;

use super::{check_row, check_verb, BaseModel, ModelError};
use crate::corpus::{NounId, PairCorpus, VerbId};
use crate::scalar::Real;

/// Relative-frequency estimates in both directions:
/// `P(v | n) = c(n, v) / c(n)` and `P(n | v) = c(n, v) / c(v)`.
#[derive(Debug, Clone)]
pub struct MleModel<T> {
    corpus: Arc<PairCorpus>,
    _scalar: PhantomData<T>,
}

impl<T: Real> MleModel<T> {
    pub fn new(corpus: Arc<PairCorpus>) -> Self {
        MleModel {
            corpus,
            _scalar: PhantomData,
        }
    }

    pub fn shared_corpus(&self) -> &Arc<PairCorpus> {
        &self.corpus
    }

    /// `P(n | v)`.
    pub fn reverse_prob(&self, v: VerbId, n: NounId) -> Result<T, ModelError> {
        check_verb(&self.corpus, v)?;
        if !self.corpus.has_noun(n) {
            return Err(ModelError::UnknownNoun(n));
        }
        let cv = self.corpus.verb_total(v);
        if cv == 0 {
            return Err(ModelError::UndefinedReverse(v));
        }
        Ok(T::from_count(self.corpus.count(n, v)) / T::from_count(cv))
    }
}

impl<T: Real> BaseModel<T> for MleModel<T> {
    fn corpus(&self) -> &PairCorpus {
        &self.corpus
    }

    fn prob(&self, n: NounId, v: VerbId) -> Result<T, ModelError> {
        let cn = check_row(&self.corpus, n)?;
        check_verb(&self.corpus, v)?;
        Ok(T::from_count(self.corpus.count(n, v)) / T::from_count(cn))
    }

    fn row(&self, n: NounId) -> Result<Vec<(VerbId, T)>, ModelError> {
        let cn = T::from_count(check_row(&self.corpus, n)?);
        Ok(self
            .corpus
            .row(n)
            .iter()
            .map(|&(v, c)| (v, T::from_count(c) / cn))
            .collect())
    }
}
