//! Distributional dissimilarity and affinity between nouns, and the weights
//! derived from them.
//!
//! Four functions compare the conditional verb distributions of two nouns:
//! KL divergence (needs a smoothed second argument), total divergence to the
//! average, L1 distance, and confusion probability. A fifth "measure", RAND,
//! assigns seeded random weights and serves as a control.

mod measures;
mod profile;
mod weight;

pub use measures::{
    confusion_probability, confusion_row, kl_divergence, kl_to_model, l1_distance, l1_distance_counted,
    total_divergence_to_average, total_divergence_to_average_counted,
};
pub use profile::{build_profile, Neighbor, RawProfile, SimilarityContext, SimilarityProfile};
pub use weight::{weight, Measure, Neighborhood, WeightConfig};

use thiserror::Error;

use crate::basemodel::{BaseModel, ModelError};
use crate::corpus::{NounId, VerbId};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimilarityError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("KL divergence undefined: smoothed probability of verb {verb} is zero")]
    UndefinedDivergence { verb: VerbId },
    #[error("zero unigram probability for verb {verb}; estimates are not Bayes-consistent")]
    Inconsistent { verb: VerbId },
    #[error("raw value {raw} outside the domain of {measure}")]
    Domain { measure: Measure, raw: f64 },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid weight configuration: {0}")]
    Config(String),
    #[error("KL divergence requires a smoothed model")]
    MissingSmoothedModel,
    #[error("noun {0} has no defined distribution")]
    NoDistribution(NounId),
}

/// Sparse probability distribution over verbs: strictly positive entries,
/// strictly increasing ids, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDistribution<T> {
    entries: Vec<(VerbId, T)>,
}

impl<T: Real> SparseDistribution<T> {
    pub fn new(entries: Vec<(VerbId, T)>) -> Result<Self, SimilarityError> {
        if entries.is_empty() {
            return Err(SimilarityError::InvalidDistribution("empty support".into()));
        }
        if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(SimilarityError::InvalidDistribution(
                "ids not strictly increasing".into(),
            ));
        }
        if entries.iter().any(|&(_, p)| !(p > T::zero()) || !p.is_finite()) {
            return Err(SimilarityError::InvalidDistribution("non-positive probability".into()));
        }
        let sum = entries.iter().fold(T::zero(), |acc, &(_, p)| acc + p);
        if (sum - T::one()).abs() > T::normalization_tolerance(entries.len()) {
            return Err(SimilarityError::InvalidDistribution(format!("mass sums to {sum}")));
        }
        Ok(SparseDistribution { entries })
    }

    /// The conditional distribution `P(. | n)` of a base model.
    pub fn from_model<M: BaseModel<T> + ?Sized>(model: &M, n: NounId) -> Result<Self, SimilarityError> {
        Self::new(model.row(n)?)
    }

    pub fn entries(&self) -> &[(VerbId, T)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Probability of `v`, zero outside the support.
    pub fn get(&self, v: VerbId) -> T {
        self.entries
            .binary_search_by_key(&v, |&(id, _)| id)
            .map(|i| self.entries[i].1)
            .unwrap_or_else(|_| T::zero())
    }
}
