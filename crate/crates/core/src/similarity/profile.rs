use rayon::prelude::*;
use std::cmp::Ordering;
use std::sync::{Arc, OnceLock};

use super::measures::{confusion_row, kl_to_model, l1_distance, total_divergence_to_average};
use super::{weight, Measure, SimilarityError, SparseDistribution, WeightConfig};
use crate::basemodel::{BaseModel, KatzModel, MleModel};
use crate::corpus::{NounId, PairCorpus};
use crate::rng::pair_uniform;
use crate::scalar::Real;

/// Raw values of one measure from a target to every candidate, best first.
/// Ties break by ascending noun id.
#[derive(Debug, Clone, PartialEq)]
pub struct RawProfile<T> {
    pub target: NounId,
    pub measure: Measure,
    pub ranked: Vec<(NounId, T)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor<T> {
    pub noun: NounId,
    pub raw: T,
    pub weight: T,
}

/// `S(n)` with weights `W(n, n')`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityProfile<T> {
    pub target: NounId,
    pub measure: Measure,
    pub neighbors: Vec<Neighbor<T>>,
}

impl<T: Real> SimilarityProfile<T> {
    /// `N(n)`, the sum of weights over the neighborhood.
    pub fn normalizer(&self) -> T {
        self.neighbors.iter().fold(T::zero(), |acc, nb| acc + nb.weight)
    }
}

type Cached<V> = OnceLock<Result<Arc<V>, SimilarityError>>;

/// Everything needed to compare nouns of one training corpus.
///
/// AVG and L1 compare rows of the base model. KL compares the MLE row of the
/// target with the Katz row of the candidate. CONFUSION always uses MLE
/// estimates, which are Bayes-consistent. Only nouns with a nonzero count
/// are candidates. Rows and raw profiles are computed on first use and
/// cached; concurrent fills are safe and yield identical values.
pub struct SimilarityContext<T: Real> {
    corpus: Arc<PairCorpus>,
    mle: MleModel<T>,
    base: Arc<dyn BaseModel<T>>,
    katz: Option<Arc<KatzModel<T>>>,
    rand_seed: u64,
    candidates: Vec<NounId>,
    mle_rows: Vec<Cached<SparseDistribution<T>>>,
    base_rows: Vec<Cached<SparseDistribution<T>>>,
    raw: Vec<Vec<Cached<RawProfile<T>>>>,
}

impl<T: Real> SimilarityContext<T> {
    pub fn new(
        corpus: Arc<PairCorpus>,
        base: Arc<dyn BaseModel<T>>,
        katz: Option<Arc<KatzModel<T>>>,
        rand_seed: u64,
    ) -> Self {
        let n = corpus.nouns().len();
        let candidates = corpus.noun_ids().filter(|&m| corpus.noun_total(m) > 0).collect();
        fn cells<V>(n: usize) -> Vec<Cached<V>> {
            (0..n).map(|_| OnceLock::new()).collect()
        }
        SimilarityContext {
            mle: MleModel::new(corpus.clone()),
            corpus,
            base,
            katz,
            rand_seed,
            candidates,
            mle_rows: cells(n),
            base_rows: cells(n),
            raw: Measure::ALL.iter().map(|_| cells(n)).collect(),
        }
    }

    pub fn corpus(&self) -> &Arc<PairCorpus> {
        &self.corpus
    }

    pub fn base(&self) -> &Arc<dyn BaseModel<T>> {
        &self.base
    }

    pub fn mle(&self) -> &MleModel<T> {
        &self.mle
    }

    pub fn rand_seed(&self) -> u64 {
        self.rand_seed
    }

    /// Nouns eligible as neighbors.
    pub fn candidates(&self) -> &[NounId] {
        &self.candidates
    }

    fn cell<V>(cells: &[Cached<V>], n: NounId) -> Result<&Cached<V>, SimilarityError> {
        cells.get(n.index()).ok_or(SimilarityError::NoDistribution(n))
    }

    pub fn mle_row(&self, n: NounId) -> Result<Arc<SparseDistribution<T>>, SimilarityError> {
        Self::cell(&self.mle_rows, n)?
            .get_or_init(|| SparseDistribution::from_model(&self.mle, n).map(Arc::new))
            .clone()
    }

    pub fn base_row(&self, n: NounId) -> Result<Arc<SparseDistribution<T>>, SimilarityError> {
        Self::cell(&self.base_rows, n)?
            .get_or_init(|| SparseDistribution::from_model(self.base.as_ref(), n).map(Arc::new))
            .clone()
    }

    /// Raw dissimilarity (KL, AVG, L1) or affinity (CONFUSION, RAND) of
    /// `candidate` relative to `target`.
    pub fn raw_value(&self, measure: Measure, target: NounId, candidate: NounId) -> Result<T, SimilarityError> {
        match measure {
            Measure::Kl => {
                let katz = self.katz.as_ref().ok_or(SimilarityError::MissingSmoothedModel)?;
                kl_to_model(&*self.mle_row(target)?, katz, candidate)
            }
            Measure::Avg => Ok(total_divergence_to_average(
                &*self.base_row(target)?,
                &*self.base_row(candidate)?,
            )),
            Measure::L1 => Ok(l1_distance(&*self.base_row(target)?, &*self.base_row(candidate)?)),
            Measure::Confusion => super::confusion_probability(&self.mle, target, candidate),
            Measure::Rand => Ok(T::lit(pair_uniform(self.rand_seed, target.0, candidate.0))),
        }
    }

    /// All candidates ranked by `measure` relative to `target`.
    pub fn raw_profile(&self, measure: Measure, target: NounId) -> Result<Arc<RawProfile<T>>, SimilarityError> {
        Self::cell(&self.raw[measure.index()], target)?
            .get_or_init(|| self.compute_raw_profile(measure, target).map(Arc::new))
            .clone()
    }

    fn compute_raw_profile(&self, measure: Measure, target: NounId) -> Result<RawProfile<T>, SimilarityError> {
        if self.corpus.noun_total(target) == 0 {
            return Err(SimilarityError::NoDistribution(target));
        }
        let mut ranked: Vec<(NounId, T)> = match measure {
            Measure::Confusion => {
                let row = confusion_row(&self.mle, target)?;
                self.candidates.iter().map(|&m| (m, row[m.index()])).collect()
            }
            _ => self
                .candidates
                .par_iter()
                .map(|&m| self.raw_value(measure, target, m).map(|r| (m, r)))
                .collect::<Result<_, _>>()?,
        };
        let ascending = measure.is_dissimilarity();
        ranked.sort_by(|a, b| {
            let by_value = if ascending {
                a.1.partial_cmp(&b.1)
            } else {
                b.1.partial_cmp(&a.1)
            };
            by_value.unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0))
        });
        Ok(RawProfile {
            target,
            measure,
            ranked,
        })
    }

    /// Applies the neighborhood policy and attaches weights.
    pub fn profile(&self, target: NounId, config: &WeightConfig<T>) -> Result<SimilarityProfile<T>, SimilarityError> {
        config.validate()?;
        // RAND weights are keyed by this context's seed, matching the raw values.
        let config = &WeightConfig {
            seed: self.rand_seed,
            ..*config
        };
        let raw = self.raw_profile(config.measure, target)?;
        let threshold = config.neighborhood.threshold().map(T::lit);
        let limit = config.neighborhood.limit().unwrap_or(usize::MAX);
        let dissimilarity = config.measure.is_dissimilarity();
        let mut neighbors = Vec::new();
        for &(noun, r) in raw.ranked.iter() {
            if neighbors.len() >= limit {
                break;
            }
            if let Some(t) = threshold {
                let keep = if dissimilarity { r < t } else { r > t };
                if !keep {
                    // ranked order: nothing later passes either
                    break;
                }
            }
            neighbors.push(Neighbor {
                noun,
                raw: r,
                weight: weight(config, r, (target, noun))?,
            });
        }
        Ok(SimilarityProfile {
            target,
            measure: config.measure,
            neighbors,
        })
    }
}

/// Free-function form of [`SimilarityContext::profile`].
pub fn build_profile<T: Real>(
    ctx: &SimilarityContext<T>,
    target: NounId,
    config: &WeightConfig<T>,
) -> Result<SimilarityProfile<T>, SimilarityError> {
    ctx.profile(target, config)
}
