//! Ablation studies: external source count, internal input features, and
//! external salary-attribute groups.

use serde::Serialize;

use crate::datagen::LabeledExample;
use crate::error::Result;
use crate::learners::{gbt_train, BowFeaturizer, BowField};
use crate::metrics::mae_mre_dollars;
use crate::money::Money;
use crate::rng::Rng;

use super::eval::EvalInputs;
use super::{kfold_indices, train_external, SalaryGroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Study {
    /// Vary the number of source slots the external model consumes (1..=5).
    SourcesCount,
    /// Retrain BOW+GBT dropping one input field at a time.
    InputFeatures,
    /// Retrain the external model dropping one salary group at a time.
    SalaryFeatures,
}

impl Study {
    pub fn parse(s: &str) -> Option<Study> {
        match s {
            "sources_count" => Some(Study::SourcesCount),
            "input_features" => Some(Study::InputFeatures),
            "salary_features" => Some(Study::SalaryFeatures),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Study::SourcesCount => "sources_count",
            Study::InputFeatures => "input_features",
            Study::SalaryFeatures => "salary_features",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AblationRow {
    pub label: String,
    pub cv_mae: Option<f64>,
    pub test_mae: f64,
    pub test_mre: f64,
}

fn score(preds: &[f64], test: &[LabeledExample]) -> Result<(f64, f64)> {
    let predictions: Vec<Money> = preds.iter().map(|p| Money::from_dollars_f64(*p)).collect();
    let actuals: Vec<Money> = test.iter().map(|ex| ex.true_income).collect();
    mae_mre_dollars(&predictions, &actuals)
}

/// External model at a given slot count / dropped groups, with optional CV.
fn external_run(
    inputs: &EvalInputs<'_>,
    top_k: usize,
    dropped: &[SalaryGroup],
    folds: Option<&[Vec<usize>]>,
) -> Result<(Option<f64>, f64, f64)> {
    let model = train_external(
        inputs.train,
        inputs.cache,
        &inputs.config.external_gbt,
        top_k,
        dropped,
    )?;
    let preds: Vec<f64> = inputs
        .test
        .iter()
        .map(|ex| {
            let vector = inputs.cache.get(&ex.id).expect("cached features");
            model.predict_from_vector(vector)
        })
        .collect::<Result<_>>()?;
    let (test_mae, test_mre) = score(&preds, inputs.test)?;

    let cv = match folds {
        None => None,
        Some(folds) => {
            let mut fold_maes = Vec::with_capacity(folds.len());
            for fold in folds {
                let holdout: std::collections::BTreeSet<usize> = fold.iter().copied().collect();
                let fit: Vec<LabeledExample> = inputs
                    .train
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !holdout.contains(i))
                    .map(|(_, ex)| ex.clone())
                    .collect();
                let fold_model = train_external(
                    &fit,
                    inputs.cache,
                    &inputs.config.external_gbt,
                    top_k,
                    dropped,
                )?;
                let validate: Vec<LabeledExample> =
                    fold.iter().map(|&i| inputs.train[i].clone()).collect();
                let preds: Vec<f64> = validate
                    .iter()
                    .map(|ex| {
                        let vector = inputs.cache.get(&ex.id).expect("cached features");
                        fold_model.predict_from_vector(vector)
                    })
                    .collect::<Result<_>>()?;
                let (mae, _) = score(&preds, &validate)?;
                fold_maes.push(mae);
            }
            Some(fold_maes.iter().sum::<f64>() / fold_maes.len() as f64)
        }
    };
    Ok((cv, test_mae, test_mre))
}

/// BOW+GBT with one input field's columns removed (or none).
fn bow_run(
    inputs: &EvalInputs<'_>,
    drop: Option<BowField>,
    folds: Option<&[Vec<usize>]>,
) -> Result<(Option<f64>, f64, f64)> {
    let strip = |features: Vec<f64>| -> Vec<f64> {
        match drop {
            None => features,
            Some(field) => {
                let range = BowFeaturizer::field_columns(field);
                features
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !range.contains(i))
                    .map(|(_, v)| v)
                    .collect()
            }
        }
    };
    let fit_predict = |fit: &[LabeledExample], validate: &[LabeledExample]| -> Result<Vec<f64>> {
        let rows: Vec<_> = fit.iter().map(|ex| ex.identity.redact()).collect();
        let featurizer = BowFeaturizer::fit(&rows);
        let xs: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| strip(featurizer.featurize(r)))
            .collect();
        let ys: Vec<f64> = fit.iter().map(|ex| ex.true_income.as_dollars_f64()).collect();
        let gbt = gbt_train(&xs, &ys, &inputs.config.bow_gbt)?;
        validate
            .iter()
            .map(|ex| gbt.predict(&strip(featurizer.featurize(&ex.identity.redact()))))
            .collect()
    };

    let preds = fit_predict(inputs.train, inputs.test)?;
    let (test_mae, test_mre) = score(&preds, inputs.test)?;
    let cv = match folds {
        None => None,
        Some(folds) => {
            let mut fold_maes = Vec::with_capacity(folds.len());
            for fold in folds {
                let holdout: std::collections::BTreeSet<usize> = fold.iter().copied().collect();
                let fit: Vec<LabeledExample> = inputs
                    .train
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !holdout.contains(i))
                    .map(|(_, ex)| ex.clone())
                    .collect();
                let validate: Vec<LabeledExample> =
                    fold.iter().map(|&i| inputs.train[i].clone()).collect();
                let preds = fit_predict(&fit, &validate)?;
                let (mae, _) = score(&preds, &validate)?;
                fold_maes.push(mae);
            }
            Some(fold_maes.iter().sum::<f64>() / fold_maes.len() as f64)
        }
    };
    Ok((cv, test_mae, test_mre))
}

/// Run one ablation study. Row layouts mirror the comparison tables: the
/// source-count study has one row per slot count; the feature studies have
/// an "All features" row followed by one "- <feature>" row per drop.
pub fn ablate(inputs: &EvalInputs<'_>, study: Study, with_cv: bool) -> Result<Vec<AblationRow>> {
    let folds = if with_cv {
        Some(kfold_indices(
            inputs.train.len(),
            inputs.config.cv_folds,
            Rng::new(inputs.config.seed).fork("cv").next_u64(),
        )?)
    } else {
        None
    };
    let folds_ref = folds.as_deref();
    let mut rows = Vec::new();
    match study {
        Study::SourcesCount => {
            for k in 1..=crate::extfeat::SOURCE_SLOTS {
                let (cv, test_mae, test_mre) = external_run(inputs, k, &[], folds_ref)?;
                rows.push(AblationRow {
                    label: k.to_string(),
                    cv_mae: cv,
                    test_mae,
                    test_mre,
                });
            }
        }
        Study::InputFeatures => {
            let (cv, test_mae, test_mre) = bow_run(inputs, None, folds_ref)?;
            rows.push(AblationRow {
                label: "All features".to_string(),
                cv_mae: cv,
                test_mae,
                test_mre,
            });
            for field in BowField::ALL {
                let (cv, test_mae, test_mre) = bow_run(inputs, Some(field), folds_ref)?;
                rows.push(AblationRow {
                    label: format!("- {}", field.label()),
                    cv_mae: cv,
                    test_mae,
                    test_mre,
                });
            }
        }
        Study::SalaryFeatures => {
            let top_k = inputs.config.top_k_sources;
            let (cv, test_mae, test_mre) = external_run(inputs, top_k, &[], folds_ref)?;
            rows.push(AblationRow {
                label: "All features".to_string(),
                cv_mae: cv,
                test_mae,
                test_mre,
            });
            for group in SalaryGroup::ALL {
                let (cv, test_mae, test_mre) =
                    external_run(inputs, top_k, &[group], folds_ref)?;
                rows.push(AblationRow {
                    label: format!("- {}", group.label()),
                    cv_mae: cv,
                    test_mae,
                    test_mre,
                });
            }
        }
    }
    Ok(rows)
}
