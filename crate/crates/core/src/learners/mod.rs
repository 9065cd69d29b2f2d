//! From-scratch learning primitives: skip-gram word vectors, bag-of-words
//! features, feed-forward and LSTM regressors with MAE loss, and gradient
//! boosted regression trees. All training is single-threaded and seeded.

pub mod bow;
pub mod ffn;
pub mod gbt;
pub mod lstm;
pub mod word2vec;

pub use bow::{BowFeaturizer, BowField, BOW_DIM};
pub use ffn::{ffn_train, Ffn, FfnConfig};
pub use gbt::{gbt_train, GbtConfig, GbtEnsemble};
pub use lstm::{lstm_regress_train, LstmConfig, LstmRegressor};
pub use word2vec::{train_word_vectors, Embeddings, W2vConfig};
