//! Model evaluation: cross-validation MAE, test MAE/MRE, and the
//! verification-task precision/recall/F1.

use serde::{Deserialize, Serialize};

use crate::datagen::{ExternalTextRow, LabeledExample};
use crate::error::{Error, Result};
use crate::metrics::mae_mre_dollars;
use crate::money::Money;
use crate::rng::Rng;

use super::{
    kfold_indices, train_combined, train_external, train_internal, verify_income,
    ExternalContext, FeatureCache, Model, PipelineConfig, Variant,
};

/// Everything evaluation needs, prepared once.
pub struct EvalInputs<'a> {
    pub train: &'a [LabeledExample],
    pub test: &'a [LabeledExample],
    pub ctx: &'a ExternalContext,
    pub cache: &'a FeatureCache,
    pub external_text: &'a [ExternalTextRow],
    pub config: &'a PipelineConfig,
}

/// A model named in the comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelSpec {
    BowGbt,
    MeanWvNn,
    ExternalWvNn,
    TunedWvNn,
    ExternalGbt,
    Combined,
}

impl ModelSpec {
    pub const ALL: [ModelSpec; 6] = [
        ModelSpec::BowGbt,
        ModelSpec::MeanWvNn,
        ModelSpec::ExternalWvNn,
        ModelSpec::TunedWvNn,
        ModelSpec::ExternalGbt,
        ModelSpec::Combined,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            ModelSpec::BowGbt => "BOW + GBT",
            ModelSpec::MeanWvNn => "Mean WV + NN",
            ModelSpec::ExternalWvNn => "External Mean WV + NN",
            ModelSpec::TunedWvNn => "Tuned Mean WV + NN",
            ModelSpec::ExternalGbt => "External data + GBT",
            ModelSpec::Combined => "Combined + GBT",
        }
    }

    pub fn parse(s: &str) -> Option<ModelSpec> {
        match s {
            "bow_gbt" => Some(ModelSpec::BowGbt),
            "mean_wv_nn" => Some(ModelSpec::MeanWvNn),
            "external_wv_nn" => Some(ModelSpec::ExternalWvNn),
            "tuned_wv_nn" => Some(ModelSpec::TunedWvNn),
            "external_gbt" => Some(ModelSpec::ExternalGbt),
            "combined" => Some(ModelSpec::Combined),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelSpec::BowGbt => "bow_gbt",
            ModelSpec::MeanWvNn => "mean_wv_nn",
            ModelSpec::ExternalWvNn => "external_wv_nn",
            ModelSpec::TunedWvNn => "tuned_wv_nn",
            ModelSpec::ExternalGbt => "external_gbt",
            ModelSpec::Combined => "combined",
        }
    }
}

/// One prediction-task report row.
#[derive(Debug, Clone, Serialize)]
pub struct EvalRow {
    pub model: String,
    pub cv_mae: Option<f64>,
    pub test_mae: f64,
    pub test_mre: f64,
}

/// One verification-task report row.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationRow {
    pub model: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Train a spec on `fit` and predict `score`, returning dollar predictions.
pub fn fit_and_predict(
    spec: ModelSpec,
    fit: &[LabeledExample],
    score: &[LabeledExample],
    inputs: &EvalInputs<'_>,
) -> Result<Vec<f64>> {
    let config = inputs.config;
    let model = match spec {
        ModelSpec::BowGbt => Model::Internal(train_internal(
            fit,
            Variant::BowGbt,
            inputs.external_text,
            config,
        )?),
        ModelSpec::MeanWvNn => Model::Internal(train_internal(
            fit,
            Variant::MeanWvNn,
            inputs.external_text,
            config,
        )?),
        ModelSpec::ExternalWvNn => Model::Internal(train_internal(
            fit,
            Variant::ExternalWvNn,
            inputs.external_text,
            config,
        )?),
        ModelSpec::TunedWvNn => Model::Internal(train_internal(
            fit,
            Variant::TunedWvNn,
            inputs.external_text,
            config,
        )?),
        ModelSpec::ExternalGbt => Model::External(train_external(
            fit,
            inputs.cache,
            &config.external_gbt,
            config.top_k_sources,
            &[],
        )?),
        ModelSpec::Combined => Model::Combined(train_combined(
            fit,
            inputs.cache,
            config.combined_internal,
            inputs.external_text,
            config,
        )?),
    };
    score
        .iter()
        .map(|ex| predict_for_example(&model, ex, inputs).map(|m| m.as_dollars_f64()))
        .collect()
}

/// Prediction using the cache when the model needs external features.
fn predict_for_example(
    model: &Model,
    ex: &LabeledExample,
    inputs: &EvalInputs<'_>,
) -> Result<Money> {
    match model {
        Model::Internal(internal) => {
            Ok(Money::from_dollars_f64(internal.predict(&ex.identity.redact())?))
        }
        Model::External(external) => {
            let vector = inputs.cache.get(&ex.id).ok_or_else(|| {
                Error::Contract(format!("example {} lacks cached external features", ex.id))
            })?;
            Ok(Money::from_dollars_f64(external.predict_from_vector(vector)?))
        }
        Model::Combined(combined) => {
            let vector = inputs.cache.get(&ex.id).ok_or_else(|| {
                Error::Contract(format!("example {} lacks cached external features", ex.id))
            })?;
            let internal_pred = combined.internal.predict(&ex.identity.redact())?;
            Ok(Money::from_dollars_f64(
                combined.predict_from_parts(vector, internal_pred)?,
            ))
        }
    }
}

/// Cross-validation MAE with folds shared across model specs.
pub fn cv_mae(
    spec: ModelSpec,
    inputs: &EvalInputs<'_>,
    folds: &[Vec<usize>],
) -> Result<f64> {
    let train = inputs.train;
    let mut fold_maes = Vec::with_capacity(folds.len());
    for fold in folds {
        let holdout: std::collections::BTreeSet<usize> = fold.iter().copied().collect();
        let fit: Vec<LabeledExample> = train
            .iter()
            .enumerate()
            .filter(|(i, _)| !holdout.contains(i))
            .map(|(_, ex)| ex.clone())
            .collect();
        let validate: Vec<LabeledExample> = fold.iter().map(|&i| train[i].clone()).collect();
        let preds = fit_and_predict(spec, &fit, &validate, inputs)?;
        let predictions: Vec<Money> = preds.iter().map(|p| Money::from_dollars_f64(*p)).collect();
        let actuals: Vec<Money> = validate.iter().map(|ex| ex.true_income).collect();
        let (mae, _) = mae_mre_dollars(&predictions, &actuals)?;
        fold_maes.push(mae);
    }
    Ok(fold_maes.iter().sum::<f64>() / fold_maes.len() as f64)
}

/// Verification-task metrics on the test set. Ground truth: the stated
/// income is honest iff it lies within tau of the true income; the model
/// verifies iff the stated income lies within tau of its prediction.
pub fn verification_metrics(
    predictions: &[f64],
    test: &[LabeledExample],
    tau: f64,
) -> VerificationCounts {
    let mut counts = VerificationCounts::default();
    for (pred, ex) in predictions.iter().zip(test) {
        let Some(stated) = ex.identity.stated_income else {
            counts.skipped += 1;
            continue;
        };
        let truth = {
            let gap = stated.abs_diff(ex.true_income).as_dollars_f64();
            gap <= tau * ex.true_income.as_dollars_f64()
        };
        let predicted_money = Money::from_dollars_f64(*pred);
        let decision = match verify_income(predicted_money, stated, tau) {
            Ok(d) => d.verified,
            Err(_) => {
                counts.skipped += 1;
                continue;
            }
        };
        match (decision, truth) {
            (true, true) => counts.tp += 1,
            (true, false) => counts.fp += 1,
            (false, true) => counts.fn_ += 1,
            (false, false) => counts.tn += 1,
        }
    }
    counts
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerificationCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
    pub skipped: usize,
}

impl VerificationCounts {
    pub fn precision(&self) -> f64 {
        if self.tp + self.fp == 0 {
            0.0
        } else {
            self.tp as f64 / (self.tp + self.fp) as f64
        }
    }

    pub fn recall(&self) -> f64 {
        if self.tp + self.fn_ == 0 {
            0.0
        } else {
            self.tp as f64 / (self.tp + self.fn_) as f64
        }
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

/// Full evaluation: one prediction row per spec (CV optional) and one
/// verification row per spec.
pub fn evaluate(
    inputs: &EvalInputs<'_>,
    specs: &[ModelSpec],
    with_cv: bool,
) -> Result<(Vec<EvalRow>, Vec<VerificationRow>)> {
    let folds = if with_cv {
        Some(kfold_indices(
            inputs.train.len(),
            inputs.config.cv_folds,
            Rng::new(inputs.config.seed).fork("cv").next_u64(),
        )?)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(specs.len());
    let mut verification = Vec::with_capacity(specs.len());
    for spec in specs {
        let preds = fit_and_predict(*spec, inputs.train, inputs.test, inputs)?;
        let predictions: Vec<Money> = preds.iter().map(|p| Money::from_dollars_f64(*p)).collect();
        let actuals: Vec<Money> = inputs.test.iter().map(|ex| ex.true_income).collect();
        let (test_mae, test_mre) = mae_mre_dollars(&predictions, &actuals)?;
        let cv = match &folds {
            Some(folds) => Some(cv_mae(*spec, inputs, folds)?),
            None => None,
        };
        rows.push(EvalRow {
            model: spec.label().to_string(),
            cv_mae: cv,
            test_mae,
            test_mre,
        });
        let counts = verification_metrics(&preds, inputs.test, inputs.config.tau);
        verification.push(VerificationRow {
            model: spec.label().to_string(),
            precision: counts.precision(),
            recall: counts.recall(),
            f1: counts.f1(),
        });
    }
    Ok((rows, verification))
}
