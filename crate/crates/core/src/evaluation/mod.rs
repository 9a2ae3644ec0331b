//! Pseudo-word disambiguation: each test pair `(n, v)` becomes a choice
//! between `v` and its pseudo-word partner, and a method wins the trial by
//! scoring `v` strictly higher. Error rate is `(incorrect + ties / 2) / N`.

mod crossval;
mod experiment;
mod pseudoword;
mod report;
mod trial;

pub use crossval::{
    cross_validate, cross_validate_method, paired_difference, BaseModelId, FoldReport, Method, ModelCell,
    PairedDifference,
};
pub use experiment::{
    default_beta_grid, evaluate_split, run_experiment, Comparison, ExperimentConfig, ExperimentReport, TrialSetSummary,
};
pub use pseudoword::{build_pseudowords, PseudoWordMap};
pub use report::{COMPARISON_COLUMNS, FOLD_COLUMNS, REPORT_FORMAT, REPORT_VERSION};
pub use trial::{build_trials, error_rate, run_trial, Decision, ErrorCounts, Trial, TrialOutcome, TrialSet};

use thiserror::Error;

use crate::basemodel::ModelError;
use crate::corpus::{CorpusError, NounId, VerbId};
use crate::estimator::EstimatorError;
use crate::similarity::SimilarityError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("trial (noun {noun}, verb {verb}): {source}")]
    Trial {
        noun: NounId,
        verb: VerbId,
        #[source]
        source: Box<EvalError>,
    },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}
