use std::path::PathBuf;

use simsmooth::basemodel::ModelError;
use simsmooth::corpus::CorpusError;
use simsmooth::estimator::EstimatorError;
use simsmooth::evaluation::EvalError;
use simsmooth::similarity::SimilarityError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        #[source]
        source: CorpusError,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 internal, 2 input/output, 3 usage or configuration.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Input { .. } => 2,
            CliError::Usage(_) => 3,
            CliError::Eval(e) => eval_code(e),
            CliError::Model(e) => model_code(e),
            CliError::Similarity(e) => similarity_code(e),
            CliError::Estimator(e) => estimator_code(e),
        }
    }
}

fn model_code(e: &ModelError) -> u8 {
    match e {
        ModelError::UnknownNoun(_)
        | ModelError::UnknownVerb(_)
        | ModelError::UndefinedConditional(_)
        | ModelError::UndefinedReverse(_)
        | ModelError::EmptyCorpus
        | ModelError::NoDiscountCutoff { .. } => 3,
    }
}

fn similarity_code(e: &SimilarityError) -> u8 {
    match e {
        SimilarityError::Model(m) => model_code(m),
        SimilarityError::Config(_) | SimilarityError::MissingSmoothedModel | SimilarityError::NoDistribution(_) => 3,
        _ => 1,
    }
}

fn estimator_code(e: &EstimatorError) -> u8 {
    match e {
        EstimatorError::Model(m) => model_code(m),
        EstimatorError::Similarity(s) => similarity_code(s),
        EstimatorError::Config(_) | EstimatorError::MissingDiscounts => 3,
        _ => 1,
    }
}

fn eval_code(e: &EvalError) -> u8 {
    match e {
        EvalError::Corpus(CorpusError::Io(_)) => 2,
        EvalError::Corpus(_) | EvalError::Config(_) => 3,
        EvalError::Model(m) => model_code(m),
        EvalError::Similarity(s) => similarity_code(s),
        EvalError::Estimator(s) => estimator_code(s),
        EvalError::Trial { source, .. } => eval_code(source),
        EvalError::ThreadPool(_) => 1,
    }
}
