//! LSTM regressor with full backpropagation through time.
//!
//! Architecture: embedding layer (rows are trainable, so training tunes the
//! word vectors), a single LSTM layer, inverted dropout on the final hidden
//! state (training only), a ReLU dense layer, and a linear output. Loss is
//! MAE on scaled targets, optimized with plain per-example gradient descent.
//!
//! Gate layout stacks input, forget, cell, output gates as four h-sized
//! blocks in every 4h-dimensional quantity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::word2vec::Embeddings;
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmConfig {
    pub hidden: usize,
    pub dense: usize,
    pub dropout: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    /// sequences longer than this are truncated
    pub seq_cap: usize,
    pub target_scale: f64,
    pub seed: u64,
}

impl Default for LstmConfig {
    fn default() -> Self {
        LstmConfig {
            hidden: 128,
            dense: 200,
            dropout: 0.5,
            epochs: 3,
            learning_rate: 0.02,
            seq_cap: 16,
            target_scale: 1e5,
            seed: 1,
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmRegressor {
    pub embeddings: Embeddings,
    pub hidden: usize,
    pub dense: usize,
    /// 4h x d input-to-gate weights
    w_x: Vec<f64>,
    /// 4h x h hidden-to-gate weights
    w_h: Vec<f64>,
    /// 4h gate biases
    b: Vec<f64>,
    /// dense x h
    dense_w: Vec<f64>,
    dense_b: Vec<f64>,
    /// 1 x dense
    out_w: Vec<f64>,
    out_b: f64,
    pub dropout: f64,
    pub seq_cap: usize,
    pub target_scale: f64,
}

/// Per-step forward cache for BPTT.
struct StepCache {
    input: Vec<f64>,
    gates: Vec<f64>, // i,f,g,o post-activation, 4h
    c: Vec<f64>,
    tanh_c: Vec<f64>,
    h: Vec<f64>,
}

struct ForwardCache {
    steps: Vec<StepCache>,
    dropped_h: Vec<f64>,
    dropout_mask: Vec<f64>,
    dense_pre: Vec<f64>,
    dense_act: Vec<f64>,
    prediction: f64,
    /// token ids per step; None for the mean-vector fallback input
    token_ids: Vec<Option<usize>>,
}

/// Gradients matching the parameter layout, plus per-row embedding grads.
pub struct LstmGrads {
    w_x: Vec<f64>,
    w_h: Vec<f64>,
    b: Vec<f64>,
    dense_w: Vec<f64>,
    dense_b: Vec<f64>,
    out_w: Vec<f64>,
    out_b: f64,
    embed: std::collections::BTreeMap<usize, Vec<f64>>,
}

impl LstmRegressor {
    pub fn init(embeddings: Embeddings, config: &LstmConfig) -> LstmRegressor {
        let d = embeddings.dim();
        let h = config.hidden;
        let mut rng = Rng::new(config.seed).fork("lstm-init");
        let mut uniform = |n: usize, bound: f64| -> Vec<f64> {
            (0..n).map(|_| rng.uniform(-bound, bound)).collect()
        };
        let gate_bound = 1.0 / ((d + h) as f64).sqrt();
        let dense_bound = 1.0 / (h as f64).sqrt();
        let out_bound = 1.0 / (config.dense as f64).sqrt();
        LstmRegressor {
            hidden: h,
            dense: config.dense,
            w_x: uniform(4 * h * d, gate_bound),
            w_h: uniform(4 * h * h, gate_bound),
            b: vec![0.0; 4 * h],
            dense_w: uniform(config.dense * h, dense_bound),
            dense_b: vec![0.0; config.dense],
            out_w: uniform(config.dense, out_bound),
            out_b: 0.0,
            dropout: config.dropout,
            seq_cap: config.seq_cap,
            target_scale: config.target_scale,
            embeddings,
        }
    }

    fn embed_dim(&self) -> usize {
        self.embeddings.dim()
    }

    /// Token ids for a sequence, capped; empty sequences fall back to one
    /// mean-vector step and report it.
    pub fn encode(&self, tokens: &[String]) -> (Vec<Option<usize>>, bool) {
        let ids: Vec<Option<usize>> = tokens
            .iter()
            .take(self.seq_cap)
            .map(|t| self.embeddings.token_index(t))
            .collect();
        if ids.is_empty() {
            (vec![None], true)
        } else {
            (ids, false)
        }
    }

    fn input_vector(&self, id: Option<usize>) -> Vec<f64> {
        match id {
            Some(row) => self.embeddings.row(row).to_vec(),
            None => self.embeddings.mean_vector().to_vec(),
        }
    }

    /// Forward pass. `dropout_mask` is `Some(scaled keep mask)` in training
    /// mode; `None` means evaluation (identity).
    fn forward(&self, token_ids: &[Option<usize>], dropout_mask: Option<Vec<f64>>) -> ForwardCache {
        let h_dim = self.hidden;
        let d = self.embed_dim();
        let mut h = vec![0.0; h_dim];
        let mut c = vec![0.0; h_dim];
        let mut steps = Vec::with_capacity(token_ids.len());
        for id in token_ids {
            let input = self.input_vector(*id);
            let mut gates = vec![0.0; 4 * h_dim];
            for g in 0..4 * h_dim {
                let mut z = self.b[g];
                let xrow = &self.w_x[g * d..(g + 1) * d];
                for (w, x) in xrow.iter().zip(&input) {
                    z += w * x;
                }
                let hrow = &self.w_h[g * h_dim..(g + 1) * h_dim];
                for (w, hv) in hrow.iter().zip(&h) {
                    z += w * hv;
                }
                gates[g] = z;
            }
            let mut new_c = vec![0.0; h_dim];
            let mut new_h = vec![0.0; h_dim];
            let mut tanh_c = vec![0.0; h_dim];
            for k in 0..h_dim {
                let i_g = sigmoid(gates[k]);
                let f_g = sigmoid(gates[h_dim + k]);
                let g_g = gates[2 * h_dim + k].tanh();
                let o_g = sigmoid(gates[3 * h_dim + k]);
                gates[k] = i_g;
                gates[h_dim + k] = f_g;
                gates[2 * h_dim + k] = g_g;
                gates[3 * h_dim + k] = o_g;
                new_c[k] = f_g * c[k] + i_g * g_g;
                tanh_c[k] = new_c[k].tanh();
                new_h[k] = o_g * tanh_c[k];
            }
            c = new_c.clone();
            let prev_h = std::mem::replace(&mut h, new_h.clone());
            let _ = prev_h;
            steps.push(StepCache {
                input,
                gates,
                c: new_c,
                tanh_c,
                h: new_h,
            });
        }

        let mask = dropout_mask.unwrap_or_else(|| vec![1.0; h_dim]);
        let dropped_h: Vec<f64> = h.iter().zip(&mask).map(|(v, m)| v * m).collect();
        let mut dense_pre = vec![0.0; self.dense];
        let mut dense_act = vec![0.0; self.dense];
        for o in 0..self.dense {
            let row = &self.dense_w[o * h_dim..(o + 1) * h_dim];
            let mut z = self.dense_b[o];
            for (w, v) in row.iter().zip(&dropped_h) {
                z += w * v;
            }
            dense_pre[o] = z;
            dense_act[o] = z.max(0.0);
        }
        let prediction = self
            .out_w
            .iter()
            .zip(&dense_act)
            .map(|(w, a)| w * a)
            .sum::<f64>()
            + self.out_b;

        ForwardCache {
            steps,
            dropped_h,
            dropout_mask: mask,
            dense_pre,
            dense_act,
            prediction,
            token_ids: token_ids.to_vec(),
        }
    }

    /// Evaluation-mode output in scaled-target space.
    pub fn forward_scaled(&self, tokens: &[String]) -> f64 {
        let (ids, _) = self.encode(tokens);
        self.forward(&ids, None).prediction
    }

    /// Dollar-space prediction, clamped at zero.
    pub fn predict(&self, tokens: &[String]) -> f64 {
        (self.forward_scaled(tokens) * self.target_scale).max(0.0)
    }

    /// MAE over sequences, scaled space, evaluation mode.
    pub fn loss_scaled(&self, sequences: &[Vec<String>], ys_scaled: &[f64]) -> f64 {
        let total: f64 = sequences
            .iter()
            .zip(ys_scaled)
            .map(|(s, y)| (self.forward_scaled(s) - y).abs())
            .sum();
        total / sequences.len() as f64
    }

    /// BPTT gradient of the single-example MAE loss (scaled space),
    /// evaluation-mode dropout unless a mask is supplied.
    fn backward(&self, cache: &ForwardCache, y_scaled: f64) -> LstmGrads {
        let h_dim = self.hidden;
        let d = self.embed_dim();
        let residual = cache.prediction - y_scaled;
        let d_pred = if residual > 0.0 {
            1.0
        } else if residual < 0.0 {
            -1.0
        } else {
            0.0
        };

        let mut grads = LstmGrads {
            w_x: vec![0.0; self.w_x.len()],
            w_h: vec![0.0; self.w_h.len()],
            b: vec![0.0; self.b.len()],
            dense_w: vec![0.0; self.dense_w.len()],
            dense_b: vec![0.0; self.dense_b.len()],
            out_w: vec![0.0; self.out_w.len()],
            out_b: 0.0,
            embed: Default::default(),
        };

        // output layer
        grads.out_b = d_pred;
        let mut d_dense_act = vec![0.0; self.dense];
        for o in 0..self.dense {
            grads.out_w[o] = d_pred * cache.dense_act[o];
            d_dense_act[o] = d_pred * self.out_w[o];
        }
        // dense layer (ReLU)
        let mut d_dropped_h = vec![0.0; h_dim];
        for o in 0..self.dense {
            let gate = if cache.dense_pre[o] > 0.0 { 1.0 } else { 0.0 };
            let dz = d_dense_act[o] * gate;
            if dz == 0.0 {
                continue;
            }
            grads.dense_b[o] += dz;
            let row = o * h_dim;
            for k in 0..h_dim {
                grads.dense_w[row + k] += dz * cache.dropped_h[k];
                d_dropped_h[k] += dz * self.dense_w[row + k];
            }
        }
        // dropout (element-wise scale)
        let mut d_h: Vec<f64> = d_dropped_h
            .iter()
            .zip(&cache.dropout_mask)
            .map(|(g, m)| g * m)
            .collect();
        let mut d_c = vec![0.0; h_dim];

        for (t, step) in cache.steps.iter().enumerate().rev() {
            let c_prev: Vec<f64> = if t == 0 {
                vec![0.0; h_dim]
            } else {
                cache.steps[t - 1].c.clone()
            };
            let h_prev: Vec<f64> = if t == 0 {
                vec![0.0; h_dim]
            } else {
                cache.steps[t - 1].h.clone()
            };
            let mut dz = vec![0.0; 4 * h_dim];
            for k in 0..h_dim {
                let i_g = step.gates[k];
                let f_g = step.gates[h_dim + k];
                let g_g = step.gates[2 * h_dim + k];
                let o_g = step.gates[3 * h_dim + k];
                let d_o = d_h[k] * step.tanh_c[k];
                let d_c_total = d_c[k] + d_h[k] * o_g * (1.0 - step.tanh_c[k] * step.tanh_c[k]);
                let d_i = d_c_total * g_g;
                let d_g = d_c_total * i_g;
                let d_f = d_c_total * c_prev[k];
                d_c[k] = d_c_total * f_g;
                dz[k] = d_i * i_g * (1.0 - i_g);
                dz[h_dim + k] = d_f * f_g * (1.0 - f_g);
                dz[2 * h_dim + k] = d_g * (1.0 - g_g * g_g);
                dz[3 * h_dim + k] = d_o * o_g * (1.0 - o_g);
            }
            // parameter and upstream gradients
            let mut d_input = vec![0.0; d];
            let mut d_h_prev = vec![0.0; h_dim];
            for g in 0..4 * h_dim {
                let dzg = dz[g];
                if dzg == 0.0 {
                    continue;
                }
                grads.b[g] += dzg;
                let xrow = g * d;
                for j in 0..d {
                    grads.w_x[xrow + j] += dzg * step.input[j];
                    d_input[j] += dzg * self.w_x[xrow + j];
                }
                let hrow = g * h_dim;
                for j in 0..h_dim {
                    grads.w_h[hrow + j] += dzg * h_prev[j];
                    d_h_prev[j] += dzg * self.w_h[hrow + j];
                }
            }
            if let Some(row) = cache.token_ids[t] {
                let acc = grads
                    .embed
                    .entry(row)
                    .or_insert_with(|| vec![0.0; d]);
                for (a, g) in acc.iter_mut().zip(&d_input) {
                    *a += g;
                }
            }
            // fallback mean-vector inputs receive no embedding gradient
            d_h = d_h_prev;
        }
        grads
    }

    fn apply(&mut self, grads: &LstmGrads, lr: f64) {
        let step = |params: &mut [f64], grads: &[f64]| {
            for (p, g) in params.iter_mut().zip(grads) {
                *p -= lr * g;
            }
        };
        step(&mut self.w_x, &grads.w_x);
        step(&mut self.w_h, &grads.w_h);
        step(&mut self.b, &grads.b);
        step(&mut self.dense_w, &grads.dense_w);
        step(&mut self.dense_b, &grads.dense_b);
        step(&mut self.out_w, &grads.out_w);
        self.out_b -= lr * grads.out_b;
        for (row, g) in &grads.embed {
            self.embeddings.row_add_scaled(*row, g, -lr);
        }
    }

    // Flat parameter access over every trainable scalar, embeddings last.
    pub fn param_count(&self) -> usize {
        self.w_x.len()
            + self.w_h.len()
            + self.b.len()
            + self.dense_w.len()
            + self.dense_b.len()
            + self.out_w.len()
            + 1
            + self.embeddings.matrix_len()
    }

    fn param_slot(&mut self, index: usize) -> &mut f64 {
        let mut index = index;
        for block in [
            &mut self.w_x,
            &mut self.w_h,
            &mut self.b,
            &mut self.dense_w,
            &mut self.dense_b,
            &mut self.out_w,
        ] {
            if index < block.len() {
                return &mut block[index];
            }
            index -= block.len();
        }
        if index == 0 {
            return &mut self.out_b;
        }
        self.embeddings.matrix_slot(index - 1)
    }

    pub fn param_add(&mut self, index: usize, delta: f64) {
        *self.param_slot(index) += delta;
    }

    /// Flat analytic gradient (evaluation mode, no dropout) for checking.
    pub fn grads_flat(&self, sequences: &[Vec<String>], ys_scaled: &[f64]) -> Vec<f64> {
        let mut flat = vec![0.0; self.param_count()];
        let inv_n = 1.0 / sequences.len() as f64;
        for (tokens, y) in sequences.iter().zip(ys_scaled) {
            let (ids, _) = self.encode(tokens);
            let cache = self.forward(&ids, None);
            let grads = self.backward(&cache, *y);
            let mut at = 0usize;
            for block in [
                &grads.w_x,
                &grads.w_h,
                &grads.b,
                &grads.dense_w,
                &grads.dense_b,
                &grads.out_w,
            ] {
                for g in block.iter() {
                    flat[at] += g * inv_n;
                    at += 1;
                }
            }
            flat[at] += grads.out_b * inv_n;
            at += 1;
            for (row, g) in &grads.embed {
                let base = at + row * self.embed_dim();
                for (j, gv) in g.iter().enumerate() {
                    flat[base + j] += gv * inv_n;
                }
            }
        }
        flat
    }
}

/// Training report: per-epoch MAE (dollars) and the number of sequences that
/// hit the empty-sequence fallback.
#[derive(Debug, Clone)]
pub struct LstmTrainReport {
    pub epoch_mae: Vec<f64>,
    pub fallback_sequences: usize,
}

/// Train the LSTM regressor; returns the model (with tuned embeddings
/// inside) and the training report.
pub fn lstm_regress_train(
    sequences: &[Vec<String>],
    embeddings: Embeddings,
    ys_dollars: &[f64],
    config: &LstmConfig,
) -> Result<(LstmRegressor, LstmTrainReport)> {
    if sequences.is_empty() || sequences.len() != ys_dollars.len() {
        return Err(Error::Contract(format!(
            "lstm training needs matching non-empty inputs, got {} x {}",
            sequences.len(),
            ys_dollars.len()
        )));
    }
    if !(0.0..1.0).contains(&config.dropout) {
        return Err(Error::Config(format!(
            "dropout must be in [0,1), got {}",
            config.dropout
        )));
    }
    let mut model = LstmRegressor::init(embeddings, config);
    let ys: Vec<f64> = ys_dollars.iter().map(|y| y / config.target_scale).collect();
    let mut fallback_sequences = 0usize;
    let encoded: Vec<Vec<Option<usize>>> = sequences
        .iter()
        .map(|s| {
            let (ids, fallback) = model.encode(s);
            if fallback {
                fallback_sequences += 1;
            }
            ids
        })
        .collect();

    let mut order: Vec<usize> = (0..sequences.len()).collect();
    let mut shuffle_rng = Rng::new(config.seed).fork("lstm-shuffle");
    let mut dropout_rng = Rng::new(config.seed).fork("lstm-dropout");
    let keep = 1.0 - config.dropout;
    let mut epoch_mae = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        shuffle_rng.shuffle(&mut order);
        for &idx in &order {
            let mask: Option<Vec<f64>> = if config.dropout > 0.0 {
                Some(
                    (0..model.hidden)
                        .map(|_| {
                            if dropout_rng.chance(keep) {
                                1.0 / keep
                            } else {
                                0.0
                            }
                        })
                        .collect(),
                )
            } else {
                None
            };
            let cache = model.forward(&encoded[idx], mask);
            let grads = model.backward(&cache, ys[idx]);
            model.apply(&grads, config.learning_rate);
        }
        let mae = model.loss_scaled(sequences, &ys) * config.target_scale;
        if !mae.is_finite() {
            return Err(Error::Diverged(format!(
                "lstm training loss became {mae} at epoch {}",
                epoch_mae.len()
            )));
        }
        epoch_mae.push(mae);
    }
    Ok((
        model,
        LstmTrainReport {
            epoch_mae,
            fallback_sequences,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::word2vec::Embeddings;

    fn toy_embeddings(dim: usize, seed: u64) -> Embeddings {
        let vocab = ["alpha", "beta", "gamma", "delta", "epsilon"];
        Embeddings::from_random(
            vocab.iter().map(|s| s.to_string()).collect(),
            dim,
            seed,
        )
    }

    fn tokens(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn small_config() -> LstmConfig {
        LstmConfig {
            hidden: 4,
            dense: 3,
            dropout: 0.0,
            epochs: 2,
            learning_rate: 0.05,
            seq_cap: 16,
            target_scale: 1.0,
            seed: 11,
        }
    }

    #[test]
    fn train_and_eval_forward_agree_when_dropout_disabled() {
        let model = LstmRegressor::init(toy_embeddings(3, 2), &small_config());
        let (ids, _) = model.encode(&tokens(&["alpha", "beta", "gamma"]));
        let eval = model.forward(&ids, None).prediction;
        // training-mode mask with dropout 0 is all ones
        let train = model.forward(&ids, Some(vec![1.0; model.hidden])).prediction;
        assert_eq!(eval, train);
    }

    #[test]
    fn bptt_gradients_match_finite_differences() {
        let eps = 1e-4;
        let config = small_config();
        let model = LstmRegressor::init(toy_embeddings(3, 5), &config);
        let sequences = vec![
            tokens(&["alpha", "beta", "gamma"]),
            tokens(&["delta", "alpha"]),
        ];
        // targets away from predictions keep the MAE kink out of FD range
        let ys: Vec<f64> = sequences
            .iter()
            .enumerate()
            .map(|(i, s)| model.forward_scaled(s) + if i % 2 == 0 { 2.0 } else { -2.0 })
            .collect();
        let analytic = model.grads_flat(&sequences, &ys);
        let mut max_rel = 0.0f64;
        for p in 0..model.param_count() {
            let mut plus = model.clone();
            plus.param_add(p, eps);
            let mut minus = model.clone();
            minus.param_add(p, -eps);
            let fd = (plus.loss_scaled(&sequences, &ys) - minus.loss_scaled(&sequences, &ys))
                / (2.0 * eps);
            let denom = analytic[p].abs().max(fd.abs()).max(1e-6);
            max_rel = max_rel.max((analytic[p] - fd).abs() / denom);
        }
        assert!(max_rel < 1e-4, "max relative error {max_rel}");
    }

    #[test]
    fn degenerate_sequences_stay_finite() {
        let config = small_config();
        let embeddings = toy_embeddings(3, 7);
        let sequences = vec![
            tokens(&["alpha"]),
            // length at the cap, all the same token
            vec!["alpha".to_string(); 40],
        ];
        let ys = vec![1.0, 2.0];
        let (model, report) = lstm_regress_train(&sequences, embeddings, &ys, &config).unwrap();
        for s in &sequences {
            let out = model.predict(s);
            assert!(out.is_finite());
        }
        assert_eq!(report.fallback_sequences, 0);
    }

    #[test]
    fn empty_sequence_uses_fallback_and_is_flagged() {
        let config = small_config();
        let embeddings = toy_embeddings(3, 9);
        let sequences = vec![tokens(&[]), tokens(&["beta"])];
        let ys = vec![1.0, 2.0];
        let (model, report) = lstm_regress_train(&sequences, embeddings, &ys, &config).unwrap();
        assert_eq!(report.fallback_sequences, 1);
        assert!(model.predict(&tokens(&[])).is_finite());
    }

    #[test]
    fn training_is_deterministic_with_dropout() {
        let config = LstmConfig {
            dropout: 0.5,
            epochs: 2,
            ..small_config()
        };
        let sequences = vec![
            tokens(&["alpha", "beta"]),
            tokens(&["gamma"]),
            tokens(&["delta", "epsilon", "alpha"]),
        ];
        let ys = vec![1.0, 2.0, 3.0];
        let (a, ra) = lstm_regress_train(&sequences, toy_embeddings(3, 13), &ys, &config).unwrap();
        let (b, rb) = lstm_regress_train(&sequences, toy_embeddings(3, 13), &ys, &config).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra.epoch_mae, rb.epoch_mae);
    }

    #[test]
    fn embedding_rows_receive_gradient() {
        let config = LstmConfig {
            epochs: 6,
            learning_rate: 0.1,
            ..small_config()
        };
        let before = toy_embeddings(3, 21);
        let alpha_before = before.row(before.token_index("alpha").unwrap()).to_vec();
        let sequences = vec![tokens(&["alpha"]), tokens(&["beta"])];
        let ys = vec![5.0, -5.0];
        let (model, _) = lstm_regress_train(&sequences, before, &ys, &config).unwrap();
        let alpha_after = model
            .embeddings
            .row(model.embeddings.token_index("alpha").unwrap());
        assert_ne!(alpha_before.as_slice(), alpha_after);
    }
}
