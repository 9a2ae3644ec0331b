use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::{run_trial, ErrorCounts, EvalError, Trial};
use crate::basemodel::{BaseModel, KatzModel, MleModel};
use crate::corpus::{NounId, PairCorpus, VerbId};
use crate::estimator::{ScoreMode, SimEstimator};
use crate::scalar::Real;
use crate::similarity::{Measure, Neighborhood, SimilarityContext, WeightConfig};

/// A scoring method in the comparison grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "MLE")]
    Mle,
    #[serde(rename = "KATZ")]
    Katz,
    #[serde(rename = "RAND")]
    Rand,
    #[serde(rename = "KL")]
    Kl,
    #[serde(rename = "AVG")]
    Avg,
    #[serde(rename = "L1")]
    L1,
    #[serde(rename = "CONFUSION")]
    Confusion,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Mle,
        Method::Katz,
        Method::Rand,
        Method::Kl,
        Method::Avg,
        Method::L1,
        Method::Confusion,
    ];

    /// The similarity measure behind a similarity-based method.
    pub fn measure(self) -> Option<Measure> {
        match self {
            Method::Mle | Method::Katz => None,
            Method::Rand => Some(Measure::Rand),
            Method::Kl => Some(Measure::Kl),
            Method::Avg => Some(Measure::Avg),
            Method::L1 => Some(Measure::L1),
            Method::Confusion => Some(Measure::Confusion),
        }
    }

    pub fn is_tunable(self) -> bool {
        self.measure().is_some_and(Measure::is_tunable)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Mle => "MLE",
            Method::Katz => "KATZ",
            Method::Rand => "RAND",
            Method::Kl => "KL",
            Method::Avg => "AVG",
            Method::L1 => "L1",
            Method::Confusion => "CONFUSION",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == upper)
            .or(match upper.as_str() {
                "BO" | "BACKOFF" => Some(Method::Katz),
                "D" => Some(Method::Kl),
                "A" => Some(Method::Avg),
                "L" => Some(Method::L1),
                "PC" => Some(Method::Confusion),
                _ => None,
            })
            .ok_or_else(|| EvalError::Config(format!("unknown method {s:?}")))
    }
}

/// Base language model a cell is built on: MLE or Katz back-off, trained
/// with or without singleton pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseModelId {
    #[serde(rename = "MLE-1")]
    Mle1,
    #[serde(rename = "MLE-o1")]
    MleO1,
    #[serde(rename = "BO-1")]
    Bo1,
    #[serde(rename = "BO-o1")]
    BoO1,
}

impl BaseModelId {
    pub const ALL: [BaseModelId; 4] = [
        BaseModelId::Mle1,
        BaseModelId::MleO1,
        BaseModelId::Bo1,
        BaseModelId::BoO1,
    ];

    pub fn is_backoff(self) -> bool {
        matches!(self, BaseModelId::Bo1 | BaseModelId::BoO1)
    }

    pub fn without_singletons(self) -> bool {
        matches!(self, BaseModelId::MleO1 | BaseModelId::BoO1)
    }

    pub fn name(self) -> &'static str {
        match self {
            BaseModelId::Mle1 => "MLE-1",
            BaseModelId::MleO1 => "MLE-o1",
            BaseModelId::Bo1 => "BO-1",
            BaseModelId::BoO1 => "BO-o1",
        }
    }
}

impl fmt::Display for BaseModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaseModelId {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        BaseModelId::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| EvalError::Config(format!("unknown base model {s:?}")))
    }
}

/// One base model with everything its methods score against.
pub struct ModelCell<T: Real> {
    id: BaseModelId,
    mle: Arc<MleModel<T>>,
    katz: Option<Arc<KatzModel<T>>>,
    context: Arc<SimilarityContext<T>>,
    neighborhood: Neighborhood,
    gamma: T,
}

impl<T: Real> ModelCell<T> {
    /// `katz` must be trained on `corpus`; back-off cells require it, MLE
    /// cells use it only for the KATZ method and the KL denominator.
    pub fn new(
        id: BaseModelId,
        corpus: Arc<PairCorpus>,
        katz: Option<Arc<KatzModel<T>>>,
        neighborhood: Neighborhood,
        gamma: T,
        rand_seed: u64,
    ) -> Result<Self, EvalError> {
        if let Some(k) = &katz {
            if !Arc::ptr_eq(k.shared_corpus(), &corpus) {
                return Err(EvalError::Config(format!("{id}: Katz model trained on another corpus")));
            }
        }
        let mle = Arc::new(MleModel::new(corpus.clone()));
        let base: Arc<dyn BaseModel<T>> = match (&katz, id.is_backoff()) {
            (Some(k), true) => k.clone(),
            (None, true) => {
                return Err(EvalError::Config(format!("{id} needs a Katz model")));
            }
            (_, false) => mle.clone(),
        };
        let context = Arc::new(SimilarityContext::new(corpus, base, katz.clone(), rand_seed));
        Ok(ModelCell {
            id,
            mle,
            katz,
            context,
            neighborhood,
            gamma,
        })
    }

    pub fn id(&self) -> BaseModelId {
        self.id
    }

    pub fn context(&self) -> &Arc<SimilarityContext<T>> {
        &self.context
    }

    fn scorer(&self, method: Method, beta: Option<T>) -> Result<Scorer<'_, T>, EvalError> {
        Ok(match method.measure() {
            None if method == Method::Mle => Scorer::Mle(&self.mle),
            None => Scorer::Katz(
                self.katz
                    .as_deref()
                    .ok_or_else(|| EvalError::Config(format!("{}: KATZ needs a Katz model", self.id)))?,
            ),
            Some(measure) => {
                let beta = beta.unwrap_or_else(T::one);
                let config = WeightConfig::new(measure, beta)
                    .with_neighborhood(self.neighborhood)
                    .with_seed(self.context.rand_seed());
                let estimator = SimEstimator::new(self.katz.clone(), self.context.clone(), config, self.gamma)?;
                Scorer::Similarity(estimator)
            }
        })
    }

    /// Error tallies of one method setting on each fold.
    pub fn evaluate(
        &self,
        method: Method,
        beta: Option<T>,
        folds: &[Vec<Trial>],
    ) -> Result<Vec<ErrorCounts>, EvalError> {
        let scorer = self.scorer(method, beta)?;
        folds
            .iter()
            .map(|fold| {
                fold.par_iter()
                    .map(|&t| {
                        let outcome = run_trial(t, |n, v| scorer.score(n, v))?;
                        let mut c = ErrorCounts::default();
                        c.record(outcome.decision);
                        Ok(c)
                    })
                    .try_reduce(ErrorCounts::default, |a, b| Ok(a.merge(b)))
            })
            .collect()
    }
}

enum Scorer<'a, T: Real> {
    Mle(&'a MleModel<T>),
    /// `alpha(n) P(v)` for unseen pairs, discounted estimate otherwise.
    Katz(&'a KatzModel<T>),
    Similarity(SimEstimator<T>),
}

impl<T: Real> Scorer<'_, T> {
    fn score(&self, n: NounId, v: VerbId) -> Result<T, EvalError> {
        Ok(match self {
            Scorer::Mle(m) => m.prob(n, v)?,
            Scorer::Katz(k) => k.prob(n, v)?,
            // Both verbs share the noun, so the normalizer can be skipped
            // unless the unigram blend needs it.
            Scorer::Similarity(e) if e.gamma() == T::zero() => e.p_sim(n, v, ScoreMode::Unnormalized)?,
            Scorer::Similarity(e) => e.p_r(n, v)?,
        })
    }
}

/// Error of one method on one test fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub base_model: BaseModelId,
    pub method: Method,
    pub fold: usize,
    /// `beta*` picked on the other folds, for tunable methods.
    pub beta: Option<f64>,
    /// Error of `beta*` on the tuning folds.
    pub tuning_error: Option<f64>,
    pub tuned_on: Vec<usize>,
    pub n: u64,
    pub incorrect: u64,
    pub ties: u64,
    pub error_rate: f64,
}

impl FoldReport {
    pub fn counts(&self) -> ErrorCounts {
        ErrorCounts {
            n: self.n,
            incorrect: self.incorrect,
            ties: self.ties,
        }
    }
}

fn fold_report(
    cell: BaseModelId,
    method: Method,
    fold: usize,
    counts: ErrorCounts,
    tuning: Option<(f64, f64, Vec<usize>)>,
) -> Result<FoldReport, EvalError> {
    let error_rate = counts
        .rate()
        .ok_or_else(|| EvalError::Config(format!("fold {fold} has no trials")))?;
    let (beta, tuning_error, tuned_on) = match tuning {
        Some((b, e, on)) => (Some(b), Some(e), on),
        None => (None, None, Vec::new()),
    };
    Ok(FoldReport {
        base_model: cell,
        method,
        fold,
        beta,
        tuning_error,
        tuned_on,
        n: counts.n,
        incorrect: counts.incorrect,
        ties: counts.ties,
        error_rate,
    })
}

/// Runs one method on one cell with k-fold cross-validation. Tunable
/// methods pick `beta` on the union of the other folds (ties go to the
/// smaller `beta`) and report on the held-out fold.
pub fn cross_validate_method<T: Real>(
    cell: &ModelCell<T>,
    method: Method,
    folds: &[Vec<Trial>],
    beta_grid: &[f64],
) -> Result<Vec<FoldReport>, EvalError> {
    if !method.is_tunable() {
        let counts = cell.evaluate(method, None, folds)?;
        return counts
            .into_iter()
            .enumerate()
            .map(|(i, c)| fold_report(cell.id, method, i, c, None))
            .collect();
    }
    if beta_grid.is_empty() {
        return Err(EvalError::Config(format!("{method} needs a non-empty beta grid")));
    }
    if let Some(b) = beta_grid.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
        return Err(EvalError::Config(format!("beta {b} must be positive and finite")));
    }
    // table[b][f]: tallies of grid point b on fold f
    let table: Vec<Vec<ErrorCounts>> = beta_grid
        .par_iter()
        .map(|&b| cell.evaluate(method, Some(T::lit(b)), folds))
        .collect::<Result<_, _>>()?;
    (0..folds.len())
        .map(|test| {
            let tuned_on: Vec<usize> = (0..folds.len()).filter(|&f| f != test).collect();
            let mut best: Option<(f64, usize)> = None;
            for (bi, row) in table.iter().enumerate() {
                let pooled = tuned_on
                    .iter()
                    .fold(ErrorCounts::default(), |acc, &f| acc.merge(row[f]));
                let err = pooled
                    .rate()
                    .ok_or_else(|| EvalError::Config("tuning folds hold no trials".into()))?;
                let better = match best {
                    None => true,
                    Some((e, bj)) => err < e || (err == e && beta_grid[bi] < beta_grid[bj]),
                };
                if better {
                    best = Some((err, bi));
                }
            }
            let (err, bi) = best.expect("grid is non-empty");
            fold_report(
                cell.id,
                method,
                test,
                table[bi][test],
                Some((beta_grid[bi], err, tuned_on)),
            )
        })
        .collect()
}

/// Cross-validates every method on every cell; reports come out grouped by
/// cell, then method, then fold, in input order.
pub fn cross_validate<T: Real>(
    cells: &[ModelCell<T>],
    methods: &[Method],
    folds: &[Vec<Trial>],
    beta_grid: &[f64],
) -> Result<Vec<FoldReport>, EvalError> {
    if methods.iter().any(|m| m.is_tunable()) && beta_grid.is_empty() {
        return Err(EvalError::Config("tunable methods need a non-empty beta grid".into()));
    }
    let jobs: Vec<(&ModelCell<T>, Method)> = cells
        .iter()
        .flat_map(|c| methods.iter().map(move |&m| (c, m)))
        .collect();
    let nested: Vec<Vec<FoldReport>> = jobs
        .par_iter()
        .map(|&(cell, m)| cross_validate_method(cell, m, folds, beta_grid))
        .collect::<Result<_, _>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// Per-fold error differences `b - a` between two methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedDifference {
    pub diffs: Vec<f64>,
    pub mean: f64,
    /// Paired t statistic; absent with fewer than two folds or zero variance.
    pub t: Option<f64>,
    pub zero_variance: bool,
}

/// Compares two runs fold by fold. A positive mean says `a` has the lower
/// error.
pub fn paired_difference(a: &[FoldReport], b: &[FoldReport]) -> Result<PairedDifference, EvalError> {
    if a.is_empty() || a.len() != b.len() {
        return Err(EvalError::Config(format!(
            "paired comparison needs equal, non-empty fold lists ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let mut diffs = Vec::with_capacity(a.len());
    for (x, y) in a.iter().zip(b) {
        if x.fold != y.fold || x.base_model != y.base_model || x.n != y.n {
            return Err(EvalError::Config(format!(
                "fold mismatch: {} fold {} vs {} fold {}",
                x.base_model, x.fold, y.base_model, y.fold
            )));
        }
        diffs.push(y.error_rate - x.error_rate);
    }
    let k = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / k;
    let ss: f64 = diffs.iter().map(|d| (d - mean) * (d - mean)).sum();
    let zero_variance = ss == 0.0;
    let t = (diffs.len() >= 2 && !zero_variance).then(|| {
        let sd = (ss / (k - 1.0)).sqrt();
        mean / (sd / k.sqrt())
    });
    Ok(PairedDifference {
        diffs,
        mean,
        t,
        zero_variance,
    })
}
