use serde::{Deserialize, Serialize};
use std::sync::Arc;

use super::report::{REPORT_FORMAT, REPORT_VERSION};
use super::{
    build_pseudowords, build_trials, cross_validate, paired_difference, BaseModelId, EvalError, FoldReport, Method,
    ModelCell, PairedDifference,
};
use crate::basemodel::{KatzModel, DEFAULT_GT_CUTOFF};
use crate::corpus::{make_folds, split_unseen_test, Pair, PairCorpus, SplitSpec};
use crate::rng::rand_weight_seed;
use crate::similarity::Neighborhood;

/// Grid `0.5, 1.0, ..., 30.0`.
pub fn default_beta_grid() -> Vec<f64> {
    (1..=60).map(|i| f64::from(i) * 0.5).collect()
}

/// Everything that determines a report. Thread count and output location
/// are deliberately absent: they cannot change the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Where the pairs came from; recorded for provenance, never read here.
    pub input: Option<String>,
    pub train_fraction: f64,
    pub folds: usize,
    pub seed: u64,
    pub models: Vec<BaseModelId>,
    pub methods: Vec<Method>,
    pub beta_grid: Vec<f64>,
    pub neighborhood: Neighborhood,
    pub gamma: f64,
    pub gt_cutoff: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            input: None,
            train_fraction: 0.8,
            folds: 5,
            seed: 0,
            models: BaseModelId::ALL.to_vec(),
            methods: Method::ALL.to_vec(),
            beta_grid: default_beta_grid(),
            neighborhood: Neighborhood::All,
            gamma: 0.0,
            gt_cutoff: DEFAULT_GT_CUTOFF,
        }
    }
}

impl ExperimentConfig {
    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            train_fraction: self.train_fraction,
            fold_count: self.folds,
            seed: self.seed,
        }
    }

    /// Checks everything that can be checked without data.
    pub fn validate(&self) -> Result<(), EvalError> {
        let bad = |m: String| Err(EvalError::Config(m));
        self.split_spec().validate()?;
        if self.models.is_empty() {
            return bad("no base models selected".into());
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        if has_duplicates(&self.models) || has_duplicates(&self.methods) {
            return bad("base models and methods must be listed at most once".into());
        }
        if self.methods.iter().any(|m| m.is_tunable()) && self.beta_grid.is_empty() {
            return bad("beta grid is empty but a tunable method is selected".into());
        }
        if let Some(b) = self.beta_grid.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            return bad(format!("beta {b} must be positive and finite"));
        }
        for m in &self.methods {
            if let Some(measure) = m.measure() {
                self.neighborhood.validate(measure)?;
            }
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad(format!("gamma {} outside [0, 1]", self.gamma));
        }
        if self.gt_cutoff == 0 {
            return bad("Good-Turing cutoff must be at least 1".into());
        }
        Ok(())
    }

    fn needs_katz(&self) -> bool {
        self.models.iter().any(|m| m.is_backoff())
            || self.methods.iter().any(|m| matches!(m, Method::Katz | Method::Kl))
    }
}

fn has_duplicates<T: PartialEq>(items: &[T]) -> bool {
    items.iter().enumerate().any(|(i, x)| items[..i].contains(x))
}

/// How the test set was turned into trials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialSetSummary {
    pub train_pairs: u64,
    pub train_singletons: u64,
    pub train_pairs_without_singletons: u64,
    pub test_pairs_unseen: usize,
    pub test_pairs_discarded_seen: usize,
    pub skipped_uncovered: usize,
    pub skipped_seen_decoy: usize,
    pub skipped_undefined_noun: usize,
    pub trials: usize,
    pub fold_sizes: Vec<usize>,
    pub pseudo_words: usize,
    pub dropped_verb: Option<String>,
    /// Good-Turing cutoff actually used, when a Katz model was built.
    pub gt_cutoff_used: Option<u64>,
}

/// AVG against another similarity method on the same base model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub base_model: BaseModelId,
    pub method: Method,
    pub against: Method,
    /// Per fold `error(against) - error(method)`.
    #[serde(flatten)]
    pub difference: PairedDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub format: String,
    pub version: u32,
    pub config: ExperimentConfig,
    pub summary: TrialSetSummary,
    pub folds: Vec<FoldReport>,
    pub comparisons: Vec<Comparison>,
}

impl ExperimentReport {
    /// Fold reports of one cell and method, in fold order.
    pub fn select(&self, model: BaseModelId, method: Method) -> Vec<&FoldReport> {
        self.folds
            .iter()
            .filter(|r| r.base_model == model && r.method == method)
            .collect()
    }

    /// Trial-weighted error of one cell and method over all folds.
    pub fn pooled_error(&self, model: BaseModelId, method: Method) -> Option<f64> {
        self.select(model, method)
            .iter()
            .fold(super::ErrorCounts::default(), |acc, r| acc.merge(r.counts()))
            .rate()
    }
}

/// Splits `corpus` and runs the whole grid. `jobs = None` uses every core.
pub fn run_experiment(
    corpus: &PairCorpus,
    config: &ExperimentConfig,
    jobs: Option<usize>,
) -> Result<ExperimentReport, EvalError> {
    config.validate()?;
    let split = split_unseen_test(corpus, &config.split_spec())?;
    let mut report = evaluate_split(split.train, &split.test, config, jobs)?;
    report.summary.test_pairs_discarded_seen = split.discarded_seen;
    Ok(report)
}

/// Runs the grid on an existing split. `test` should hold only pairs unseen
/// in `train`; seen ones are counted as discarded and skipped.
pub fn evaluate_split(
    train: PairCorpus,
    test: &[Pair],
    config: &ExperimentConfig,
    jobs: Option<usize>,
) -> Result<ExperimentReport, EvalError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| EvalError::ThreadPool(e.to_string()))?;

    let (test, seen): (Vec<Pair>, Vec<Pair>) = test.iter().partition(|p| !train.is_seen(p.noun, p.verb));
    let full = Arc::new(train);
    let stripped = Arc::new(full.strip_singletons());

    let (katz_full, katz_stripped) = if config.needs_katz() {
        let k = Arc::new(KatzModel::<f64>::build(full.clone(), config.gt_cutoff)?);
        // After stripping there are no singletons to estimate discounts from,
        // so the stripped model reuses the full training table.
        let ks = Arc::new(KatzModel::with_discounts(stripped.clone(), k.discounts().clone()));
        (Some(k), Some(ks))
    } else {
        (None, None)
    };

    let pseudo = build_pseudowords(full.verb_totals())?;
    let base_corpora: Vec<&PairCorpus> = config
        .models
        .iter()
        .map(|m| if m.without_singletons() { &*stripped } else { &*full })
        .collect();
    let trial_set = build_trials(&test, &pseudo, &full, &base_corpora);
    let folds = make_folds(&trial_set.trials, config.folds, config.seed)?;

    let rand_seed = rand_weight_seed(config.seed);
    let cells = config
        .models
        .iter()
        .map(|&id| {
            let (corpus, katz) = if id.without_singletons() {
                (stripped.clone(), katz_stripped.clone())
            } else {
                (full.clone(), katz_full.clone())
            };
            ModelCell::new(id, corpus, katz, config.neighborhood, config.gamma, rand_seed)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let reports = pool.install(|| cross_validate(&cells, &config.methods, &folds, &config.beta_grid))?;

    let mut comparisons = Vec::new();
    if config.methods.contains(&Method::Avg) {
        let similarity = [Method::Kl, Method::L1, Method::Confusion, Method::Rand];
        for &model in &config.models {
            let of = |m: Method| -> Vec<FoldReport> {
                reports
                    .iter()
                    .filter(|r| r.base_model == model && r.method == m)
                    .cloned()
                    .collect()
            };
            let avg = of(Method::Avg);
            for &other in config.methods.iter().filter(|m| similarity.contains(m)) {
                comparisons.push(Comparison {
                    base_model: model,
                    method: Method::Avg,
                    against: other,
                    difference: paired_difference(&avg, &of(other))?,
                });
            }
        }
    }

    let summary = TrialSetSummary {
        train_pairs: full.total_pairs(),
        train_singletons: full.singleton_count(),
        train_pairs_without_singletons: stripped.total_pairs(),
        test_pairs_unseen: test.len(),
        test_pairs_discarded_seen: seen.len(),
        skipped_uncovered: trial_set.skipped_uncovered,
        skipped_seen_decoy: trial_set.skipped_seen_decoy,
        skipped_undefined_noun: trial_set.skipped_undefined_noun,
        trials: trial_set.trials.len(),
        fold_sizes: folds.iter().map(Vec::len).collect(),
        pseudo_words: pseudo.pairs().len(),
        dropped_verb: pseudo.dropped().map(|v| full.verb_word(v).to_string()),
        gt_cutoff_used: katz_full.as_ref().map(|k| k.discounts().cutoff()),
    };

    Ok(ExperimentReport {
        format: REPORT_FORMAT.to_string(),
        version: REPORT_VERSION,
        config: config.clone(),
        summary,
        folds: reports,
        comparisons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_brackets() {
        let g = default_beta_grid();
        assert_eq!(g.len(), 60);
        assert_eq!(g[0], 0.5);
        assert_eq!(g[59], 30.0);
    }

    #[test]
    fn validation_happens_before_work() {
        let cfg = ExperimentConfig {
            methods: vec![Method::Avg],
            beta_grid: vec![],
            ..ExperimentConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(EvalError::Config(_))));
        let ok = ExperimentConfig {
            methods: vec![Method::Confusion],
            beta_grid: vec![],
            ..ExperimentConfig::default()
        };
        assert!(ok.validate().is_ok());
        let dup = ExperimentConfig {
            models: vec![BaseModelId::Mle1, BaseModelId::Mle1],
            ..ExperimentConfig::default()
        };
        assert!(dup.validate().is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = ExperimentConfig {
            neighborhood: Neighborhood::TopKAndThreshold(5, 0.5),
            ..ExperimentConfig::default()
        };
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&text).unwrap(), cfg);
    }
}
