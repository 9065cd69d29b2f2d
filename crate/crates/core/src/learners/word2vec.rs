//! Skip-gram word vectors with negative sampling, single-threaded and
//! seeded, so training is reproducible bit for bit.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct W2vConfig {
    pub dim: usize,
    pub epochs: usize,
    pub window: usize,
    pub negatives: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for W2vConfig {
    fn default() -> Self {
        W2vConfig {
            dim: 300,
            epochs: 15,
            window: 2,
            negatives: 5,
            learning_rate: 0.025,
            seed: 1,
        }
    }
}

/// Trained token vectors. Unknown tokens map to the mean vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embeddings {
    vocab: Vec<String>,
    index: BTreeMap<String, usize>,
    dim: usize,
    /// row-major |V| x dim
    matrix: Vec<f64>,
    mean: Vec<f64>,
}

impl Embeddings {
    fn from_matrix(vocab: Vec<String>, dim: usize, matrix: Vec<f64>) -> Embeddings {
        let index = vocab
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let mut emb = Embeddings {
            vocab,
            index,
            dim,
            matrix,
            mean: vec![0.0; dim],
        };
        emb.refresh_mean();
        emb
    }

    /// Random embeddings over a fixed vocabulary (initialization and tests).
    pub fn from_random(vocab: Vec<String>, dim: usize, seed: u64) -> Embeddings {
        let mut rng = Rng::new(seed).fork("embed-init");
        let bound = 0.5 / dim as f64;
        let matrix = (0..vocab.len() * dim)
            .map(|_| rng.uniform(-bound, bound))
            .collect();
        Embeddings::from_matrix(vocab, dim, matrix)
    }

    pub fn refresh_mean(&mut self) {
        let v = self.vocab.len().max(1);
        let mut mean = vec![0.0; self.dim];
        for row in 0..self.vocab.len() {
            for j in 0..self.dim {
                mean[j] += self.matrix[row * self.dim + j];
            }
        }
        for m in mean.iter_mut() {
            *m /= v as f64;
        }
        self.mean = mean;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab_len(&self) -> usize {
        self.vocab.len()
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn token_index(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.matrix[row * self.dim..(row + 1) * self.dim]
    }

    pub fn mean_vector(&self) -> &[f64] {
        &self.mean
    }

    /// Vector for one token; unknown tokens get the mean vector.
    pub fn lookup(&self, token: &str) -> &[f64] {
        match self.token_index(token) {
            Some(row) => self.row(row),
            None => self.mean_vector(),
        }
    }

    /// Mean of the token vectors; an empty token list gets the mean vector.
    pub fn embed_mean(&self, tokens: &[String]) -> Vec<f64> {
        if tokens.is_empty() {
            return self.mean.clone();
        }
        let mut out = vec![0.0; self.dim];
        for token in tokens {
            for (o, v) in out.iter_mut().zip(self.lookup(token)) {
                *o += v;
            }
        }
        for o in out.iter_mut() {
            *o /= tokens.len() as f64;
        }
        out
    }

    pub fn cosine(&self, a: &str, b: &str) -> f64 {
        let (va, vb) = (self.lookup(a), self.lookup(b));
        let dot: f64 = va.iter().zip(vb).map(|(x, y)| x * y).sum();
        let na: f64 = va.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = vb.iter().map(|x| x * x).sum::<f64>().sqrt();
        if na == 0.0 || nb == 0.0 {
            0.0
        } else {
            dot / (na * nb)
        }
    }

    // Internal mutation hooks for fine-tuning.
    pub(crate) fn row_add_scaled(&mut self, row: usize, grad: &[f64], scale: f64) {
        let base = row * self.dim;
        for (j, g) in grad.iter().enumerate() {
            self.matrix[base + j] += scale * g;
        }
    }

    pub(crate) fn matrix_len(&self) -> usize {
        self.matrix.len()
    }

    pub(crate) fn matrix_slot(&mut self, index: usize) -> &mut f64 {
        &mut self.matrix[index]
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_string(self)?;
        std::fs::write(path, body).map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<Embeddings> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&body)?)
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Train skip-gram negative-sampling vectors on tokenized sentences.
///
/// The vocabulary orders tokens by descending count then token text, so the
/// layout is independent of sentence order. The unigram^0.75 table drives
/// negative sampling. Training is strictly sequential.
pub fn train_word_vectors(sentences: &[Vec<String>], config: &W2vConfig) -> Result<Embeddings> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for sentence in sentences {
        for token in sentence {
            *counts.entry(token.clone()).or_insert(0) += 1;
        }
    }
    if counts.is_empty() {
        return Err(Error::InvalidInput(
            "word vector training needs a non-empty vocabulary".into(),
        ));
    }
    let mut vocab: Vec<(String, u64)> = counts.into_iter().collect();
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let tokens: Vec<String> = vocab.iter().map(|(t, _)| t.clone()).collect();
    let index: BTreeMap<&str, usize> = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let v = tokens.len();
    let d = config.dim;

    // negative-sampling cumulative table over count^0.75
    let weights: Vec<f64> = vocab.iter().map(|(_, c)| (*c as f64).powf(0.75)).collect();
    let mut cumulative = Vec::with_capacity(v);
    let mut acc = 0.0;
    for w in &weights {
        acc += w;
        cumulative.push(acc);
    }
    let total_weight = acc;

    let mut rng = Rng::new(config.seed).fork("w2v");
    let bound = 0.5 / d as f64;
    let mut input: Vec<f64> = (0..v * d).map(|_| rng.uniform(-bound, bound)).collect();
    let mut output = vec![0.0f64; v * d];

    let sentences_ids: Vec<Vec<usize>> = sentences
        .iter()
        .map(|s| s.iter().map(|t| index[t.as_str()]).collect())
        .collect();

    let sample_negative = |rng: &mut Rng| -> usize {
        let target = rng.next_f64() * total_weight;
        cumulative.partition_point(|c| *c < target).min(v - 1)
    };

    for _ in 0..config.epochs {
        for sentence in &sentences_ids {
            for (center_pos, &center) in sentence.iter().enumerate() {
                let lo = center_pos.saturating_sub(config.window);
                let hi = (center_pos + config.window).min(sentence.len() - 1);
                for context_pos in lo..=hi {
                    if context_pos == center_pos {
                        continue;
                    }
                    let context = sentence[context_pos];
                    // one positive pair plus k negatives
                    let mut accum = vec![0.0; d];
                    let v_in = center * d;
                    for sample in 0..=config.negatives {
                        let (target_row, label) = if sample == 0 {
                            (context, 1.0)
                        } else {
                            (sample_negative(&mut rng), 0.0)
                        };
                        let u = target_row * d;
                        let mut dot = 0.0;
                        for j in 0..d {
                            dot += input[v_in + j] * output[u + j];
                        }
                        let g = (sigmoid(dot) - label) * config.learning_rate;
                        for j in 0..d {
                            accum[j] += g * output[u + j];
                            output[u + j] -= g * input[v_in + j];
                        }
                    }
                    for j in 0..d {
                        input[v_in + j] -= accum[j];
                    }
                }
            }
        }
    }
    Ok(Embeddings::from_matrix(tokens, d, input))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sentences(raw: &[&str]) -> Vec<Vec<String>> {
        raw.iter()
            .map(|s| s.split_whitespace().map(str::to_string).collect())
            .collect()
    }

    fn small(seed: u64) -> W2vConfig {
        W2vConfig {
            dim: 16,
            epochs: 30,
            window: 2,
            negatives: 5,
            learning_rate: 0.05,
            seed,
        }
    }

    #[test]
    fn same_corpus_and_seed_give_identical_matrices() {
        let corpus = sentences(&[
            "software engineer salary",
            "senior software engineer",
            "chef kitchen line",
        ]);
        let a = train_word_vectors(&corpus, &small(42)).unwrap();
        let b = train_word_vectors(&corpus, &small(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shared_contexts_pull_tokens_together() {
        // "engineer" and "developer" appear in identical contexts; "chef"
        // never shares a context with them.
        let mut corpus = Vec::new();
        for _ in 0..30 {
            corpus.extend(sentences(&[
                "senior engineer writes code daily",
                "senior developer writes code daily",
                "chef cooks dinner nightly menu",
            ]));
        }
        let emb = train_word_vectors(&corpus, &small(42)).unwrap();
        let close = emb.cosine("engineer", "developer");
        let far = emb.cosine("engineer", "chef");
        assert!(
            close > far,
            "cos(engineer, developer) = {close} should exceed cos(engineer, chef) = {far}"
        );
    }

    #[test]
    fn single_token_corpus_trains_without_crashing() {
        let corpus = sentences(&["salary"]);
        let emb = train_word_vectors(&corpus, &small(7)).unwrap();
        assert_eq!(emb.vocab_len(), 1);
        assert_eq!(emb.lookup("salary").len(), 16);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(train_word_vectors(&[], &small(7)).is_err());
        assert!(train_word_vectors(&[vec![]], &small(7)).is_err());
    }

    #[test]
    fn unknown_tokens_map_to_the_mean_vector() {
        let corpus = sentences(&["alpha beta", "beta gamma"]);
        let emb = train_word_vectors(&corpus, &small(3)).unwrap();
        assert_eq!(emb.lookup("never-seen"), emb.mean_vector());
    }

    #[test]
    fn mean_of_identical_tokens_is_that_vector() {
        let corpus = sentences(&["alpha beta gamma delta"]);
        let emb = train_word_vectors(&corpus, &small(5)).unwrap();
        let single = emb.lookup("beta").to_vec();
        let tokens = vec!["beta".to_string(); 4];
        let mean = emb.embed_mean(&tokens);
        for (a, b) in single.iter().zip(&mean) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn vocabulary_order_is_count_then_token() {
        let corpus = sentences(&["b b b a a c"]);
        let emb = train_word_vectors(&corpus, &small(1)).unwrap();
        assert_eq!(emb.vocab(), &["b".to_string(), "a".to_string(), "c".to_string()]);
    }
}
