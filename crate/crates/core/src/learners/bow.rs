//! Bag-of-words featurizer: top-200 tokens each from job title and employer
//! plus city and state category codes, for a 402-dimensional vector.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::canon::tokenize;
use crate::domain::RedactedIdentity;

pub const TOKENS_PER_FIELD: usize = 200;
pub const BOW_DIM: usize = 2 * TOKENS_PER_FIELD + 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BowFeaturizer {
    /// most frequent title tokens (count desc, token asc), at most 200
    title_tokens: Vec<String>,
    employer_tokens: Vec<String>,
    title_index: BTreeMap<String, usize>,
    employer_index: BTreeMap<String, usize>,
    /// category -> 1-based code; unseen/missing get 0
    city_codes: BTreeMap<String, usize>,
    state_codes: BTreeMap<String, usize>,
}

fn top_tokens(texts: impl Iterator<Item = String>) -> Vec<String> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for text in texts {
        for token in tokenize(&text) {
            *counts.entry(token).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
        .into_iter()
        .take(TOKENS_PER_FIELD)
        .map(|(t, _)| t)
        .collect()
}

fn category_codes(values: impl Iterator<Item = Option<String>>) -> BTreeMap<String, usize> {
    let mut seen: std::collections::BTreeSet<String> = Default::default();
    for value in values.flatten() {
        if !value.trim().is_empty() {
            seen.insert(value);
        }
    }
    seen.into_iter()
        .enumerate()
        .map(|(i, v)| (v, i + 1))
        .collect()
}

impl BowFeaturizer {
    /// Fit vocabularies and category encoders on training rows only.
    pub fn fit(rows: &[RedactedIdentity]) -> BowFeaturizer {
        let title_tokens = top_tokens(rows.iter().map(|r| r.job_title.clone()));
        let employer_tokens = top_tokens(rows.iter().map(|r| r.employer.clone()));
        let title_index = title_tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let employer_index = employer_tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        BowFeaturizer {
            title_index,
            employer_index,
            title_tokens,
            employer_tokens,
            city_codes: category_codes(rows.iter().map(|r| r.city.clone())),
            state_codes: category_codes(rows.iter().map(|r| r.state.clone())),
        }
    }

    /// 402-dimensional vector: title counts, employer counts, city code,
    /// state code. The dimension is fixed regardless of vocabulary size.
    pub fn featurize(&self, row: &RedactedIdentity) -> Vec<f64> {
        let mut out = vec![0.0; BOW_DIM];
        for token in tokenize(&row.job_title) {
            if let Some(&i) = self.title_index.get(&token) {
                out[i] += 1.0;
            }
        }
        for token in tokenize(&row.employer) {
            if let Some(&i) = self.employer_index.get(&token) {
                out[TOKENS_PER_FIELD + i] += 1.0;
            }
        }
        let code = |codes: &BTreeMap<String, usize>, value: &Option<String>| -> f64 {
            value
                .as_ref()
                .and_then(|v| codes.get(v))
                .copied()
                .unwrap_or(0) as f64
        };
        out[2 * TOKENS_PER_FIELD] = code(&self.city_codes, &row.city);
        out[2 * TOKENS_PER_FIELD + 1] = code(&self.state_codes, &row.state);
        debug_assert_eq!(out.len(), BOW_DIM);
        out
    }

    /// Column index ranges by input field, used by the input-feature
    /// ablation to drop one field at a time.
    pub fn field_columns(field: BowField) -> std::ops::Range<usize> {
        match field {
            BowField::JobTitle => 0..TOKENS_PER_FIELD,
            BowField::Employer => TOKENS_PER_FIELD..2 * TOKENS_PER_FIELD,
            BowField::City => 2 * TOKENS_PER_FIELD..2 * TOKENS_PER_FIELD + 1,
            BowField::State => 2 * TOKENS_PER_FIELD + 1..BOW_DIM,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BowField {
    JobTitle,
    Employer,
    City,
    State,
}

impl BowField {
    pub const ALL: [BowField; 4] = [
        BowField::JobTitle,
        BowField::Employer,
        BowField::State,
        BowField::City,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BowField::JobTitle => "Job Title",
            BowField::Employer => "Employer Name",
            BowField::City => "City",
            BowField::State => "State",
        }
    }
}
