//! Similarity-based smoothing for sparse noun/verb pair estimates.
//!
//! The crate is organized bottom-up:
//!
//! * [`corpus`]: pair counts, vocabularies, train/test splits and folds.
//! * [`basemodel`]: maximum-likelihood and Katz back-off models.
//! * [`similarity`]: KL, total divergence to the average, L1 and confusion
//!   probability, plus weights and neighborhoods.
//! * [`estimator`]: the similarity-weighted estimate inside back-off.
//! * [`evaluation`]: the pseudo-word disambiguation experiment.
//!
//! Numeric code is generic over [`Real`]; the aliases below fix it to `f64`.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basemodel;
pub mod corpus;
pub mod estimator;
pub mod evaluation;
pub mod rng;
pub mod scalar;
pub mod similarity;

pub use scalar::Real;

pub type MleModel = basemodel::MleModel<f64>;
pub type KatzModel = basemodel::KatzModel<f64>;
pub type DiscountTable = basemodel::DiscountTable<f64>;
pub type SparseDistribution = similarity::SparseDistribution<f64>;
pub type SimilarityContext = similarity::SimilarityContext<f64>;
pub type SimilarityProfile = similarity::SimilarityProfile<f64>;
pub type WeightConfig = similarity::WeightConfig<f64>;
pub type SimEstimator = estimator::SimEstimator<f64>;

pub type MleModel32 = basemodel::MleModel<f32>;
pub type KatzModel32 = basemodel::KatzModel<f32>;
pub type SparseDistribution32 = similarity::SparseDistribution<f32>;
pub type SimEstimator32 = estimator::SimEstimator<f32>;
