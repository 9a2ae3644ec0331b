//! Similarity-based estimate for unseen pairs, plugged into the Katz
//! discounting skeleton.
//!
//! `P_SIM(v|n) = sum_{n' in S(n)} W(n, n') / N(n) * P(v|n')`,
//! `P_r(v|n) = gamma P(v) + (1 - gamma) P_SIM(v|n)`, and
//! `P_hat(v|n)` is the discounted estimate for seen pairs and
//! `alpha(n) P_r(v|n)` for unseen ones, with `alpha` renormalizing over the
//! unseen verbs of the row.

use std::sync::atomic::{AtomicU8, Ordering};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::basemodel::{BaseModel, KatzModel, ModelError};
use crate::corpus::{NounId, VerbId};
use crate::scalar::Real;
use crate::similarity::{SimilarityContext, SimilarityError, SimilarityProfile, WeightConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error("noun {0} has an empty or zero-weight neighborhood")]
    DegenerateProfile(NounId),
    #[error("noun {0}: similar words put no mass on any unseen verb")]
    NoRedistributionMass(NounId),
    #[error("invalid estimator configuration: {0}")]
    Config(String),
    #[error("normalized and unnormalized queries mixed on one estimator")]
    MixedModes,
    #[error("back-off estimates need a Katz model")]
    MissingDiscounts,
}

/// Whether `P_SIM` is divided by `N(n)`. The unnormalized sum is enough to
/// compare two verbs for the same noun.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreMode {
    Normalized = 1,
    Unnormalized = 2,
}

/// Which branch of the back-off produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    SeenDiscounted,
    UnseenSimilarity,
    UnseenUnigram,
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::SeenDiscounted => "seen/discounted",
            Branch::UnseenSimilarity => "unseen/similarity",
            Branch::UnseenUnigram => "unseen/unigram",
        }
    }
}

type Cached<V> = OnceLock<Result<V, EstimatorError>>;

pub struct SimEstimator<T: Real> {
    katz: Option<Arc<KatzModel<T>>>,
    similarity: Arc<SimilarityContext<T>>,
    config: WeightConfig<T>,
    gamma: T,
    mode: AtomicU8,
    profiles: Vec<Cached<Arc<SimilarityProfile<T>>>>,
    alphas: Vec<Cached<T>>,
}

impl<T: Real> SimEstimator<T> {
    /// `katz` supplies discounted seen-pair estimates and left-over mass and
    /// is only needed by [`p_hat`](Self::p_hat); `similarity` supplies the
    /// base rows `P(v|n')`, unigrams and the profiles.
    pub fn new(
        katz: Option<Arc<KatzModel<T>>>,
        similarity: Arc<SimilarityContext<T>>,
        config: WeightConfig<T>,
        gamma: T,
    ) -> Result<Self, EstimatorError> {
        if !(gamma >= T::zero() && gamma <= T::one()) {
            return Err(EstimatorError::Config(format!("gamma {gamma} outside [0, 1]")));
        }
        config.validate()?;
        let n = similarity.corpus().nouns().len();
        Ok(SimEstimator {
            katz,
            similarity,
            config,
            gamma,
            mode: AtomicU8::new(0),
            profiles: (0..n).map(|_| OnceLock::new()).collect(),
            alphas: (0..n).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn config(&self) -> &WeightConfig<T> {
        &self.config
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn katz(&self) -> Result<&Arc<KatzModel<T>>, EstimatorError> {
        self.katz.as_ref().ok_or(EstimatorError::MissingDiscounts)
    }

    fn lock_mode(&self, mode: ScoreMode) -> Result<(), EstimatorError> {
        let m = mode as u8;
        match self.mode.compare_exchange(0, m, Ordering::AcqRel, Ordering::Acquire) {
            Ok(_) => Ok(()),
            Err(current) if current == m => Ok(()),
            Err(_) => Err(EstimatorError::MixedModes),
        }
    }

    /// The neighborhood of `n`, computed once.
    pub fn profile(&self, n: NounId) -> Result<Arc<SimilarityProfile<T>>, EstimatorError> {
        let cell = self.profiles.get(n.index()).ok_or(ModelError::UnknownNoun(n))?;
        cell.get_or_init(|| {
            let profile = self.similarity.profile(n, &self.config)?;
            if profile.neighbors.is_empty() || !(profile.normalizer() > T::zero()) {
                return Err(EstimatorError::DegenerateProfile(n));
            }
            Ok(Arc::new(profile))
        })
        .clone()
    }

    /// `P_SIM(v | n)`, optionally without the `1 / N(n)` factor.
    pub fn p_sim(&self, n: NounId, v: VerbId, mode: ScoreMode) -> Result<T, EstimatorError> {
        self.lock_mode(mode)?;
        let profile = self.profile(n)?;
        let base = self.similarity.base();
        let mut sum = T::zero();
        match mode {
            ScoreMode::Normalized => {
                let norm = profile.normalizer();
                for nb in &profile.neighbors {
                    sum += nb.weight / norm * base.prob(nb.noun, v)?;
                }
            }
            ScoreMode::Unnormalized => {
                for nb in &profile.neighbors {
                    sum += nb.weight * base.prob(nb.noun, v)?;
                }
            }
        }
        Ok(sum)
    }

    /// `P_r(v | n) = gamma P(v) + (1 - gamma) P_SIM(v | n)`.
    pub fn p_r(&self, n: NounId, v: VerbId) -> Result<T, EstimatorError> {
        let unigram = self.similarity.base().verb_unigram(v)?;
        if self.gamma == T::one() {
            return Ok(unigram);
        }
        let sim = self.p_sim(n, v, ScoreMode::Normalized)?;
        if self.gamma == T::zero() {
            return Ok(sim);
        }
        Ok(self.gamma * unigram + (T::one() - self.gamma) * sim)
    }

    /// `alpha(n)` for similarity redistribution: left-over mass divided by
    /// the `P_r` mass of the row's unseen verbs.
    pub fn alpha(&self, n: NounId) -> Result<T, EstimatorError> {
        let katz = self.katz()?;
        if self.gamma == T::one() {
            return Ok(katz.alpha(n)?);
        }
        let cell = self.alphas.get(n.index()).ok_or(ModelError::UnknownNoun(n))?;
        cell.get_or_init(|| {
            let leftover = katz.leftover(n)?;
            if leftover == T::zero() {
                return Ok(T::zero());
            }
            let corpus = katz.corpus();
            let mut unseen = T::zero();
            for v in corpus.verb_ids() {
                if !corpus.is_seen(n, v) {
                    unseen += self.p_r(n, v)?;
                }
            }
            if !(unseen > T::zero()) {
                return Err(EstimatorError::NoRedistributionMass(n));
            }
            Ok(leftover / unseen)
        })
        .clone()
    }

    /// `P_hat(v | n)` and the branch that produced it.
    pub fn p_hat_with_branch(&self, n: NounId, v: VerbId) -> Result<(T, Branch), EstimatorError> {
        let katz = self.katz()?;
        if let Some(p) = katz.discounted_prob(n, v)? {
            return Ok((p, Branch::SeenDiscounted));
        }
        if self.gamma == T::one() {
            return Ok((katz.prob(n, v)?, Branch::UnseenUnigram));
        }
        Ok((self.alpha(n)? * self.p_r(n, v)?, Branch::UnseenSimilarity))
    }

    pub fn p_hat(&self, n: NounId, v: VerbId) -> Result<T, EstimatorError> {
        Ok(self.p_hat_with_branch(n, v)?.0)
    }
}
