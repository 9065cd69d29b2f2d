//! Offline income verification.
//!
//! Predicts a person's annual income from identity and employment input by
//! combining a text-based internal regressor with features extracted from a
//! local corpus of public salary records, then checks the stated income
//! against the prediction. The crate covers the full workflow: synthetic
//! benchmark generation, H-1B disclosure ingestion, corpus indexing and
//! retrieval, record extraction and matching, feature assembly, from-scratch
//! learners (word vectors, feed-forward and LSTM regressors, gradient
//! boosted trees), model training and stacking, evaluation, and ablations.

pub mod canon;
pub mod datagen;
pub mod defaults;
pub mod domain;
pub mod error;
pub mod extfeat;
pub mod extract;
pub mod industry;
pub mod learners;
pub mod matching;
pub mod metrics;
pub mod money;
pub mod pipeline;
pub mod retrieval;
pub mod rng;

pub use error::{Error, Result};
pub use money::Money;
