//! Model assembly: the internal text regressors, the external record-mining
//! model, the stacked combined model, prediction, and income verification.

pub mod ablate;
pub mod eval;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::canon::{tokenize, AliasKind, AliasTable};
use crate::datagen::corpus::SourceCorpus;
use crate::datagen::{ExternalTextRow, LabeledExample, MatchLabel};
use crate::domain::{state_slot, Identity, RedactedIdentity};
use crate::error::{Error, Result};
use crate::extfeat::{
    build_external_features, build_ratio_table, ExternalFeatureVector, RatioTable, EXTERNAL_DIM,
    SOURCE_SLOTS,
};
use crate::extract::{extract_corpus, PathSpecs, PatternSet, SourceRecord, TrustWeights};
use crate::industry::{Industry, IndustryTable};
use crate::learners::{
    bow::BOW_DIM, ffn_train, gbt_train, lstm_regress_train, train_word_vectors, BowFeaturizer,
    Embeddings, Ffn, FfnConfig, GbtConfig, GbtEnsemble, LstmConfig, W2vConfig,
};
use crate::matching::{
    compute_features, score_pair, train_matcher, MatchResult, PairDecisionTree, TreeConfig,
};
use crate::money::Money;
use crate::retrieval::{retrieve_candidates, CorpusIndex, RetrievalConfig};
use crate::rng::Rng;

/// Width of the word-vector internal input: two 300-dim mean vectors plus
/// the 50-slot state one-hot.
pub const WV_INPUT_DIM: usize = 650;
/// Stacked model input: the external vector plus the internal prediction.
pub const STACKED_DIM: usize = EXTERNAL_DIM + 1;

/// Internal model variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    BowGbt,
    MeanWvNn,
    ExternalWvNn,
    TunedWvNn,
}

impl Variant {
    pub fn parse(s: &str) -> Option<Variant> {
        match s {
            "bow_gbt" => Some(Variant::BowGbt),
            "mean_wv_nn" => Some(Variant::MeanWvNn),
            "external_wv_nn" => Some(Variant::ExternalWvNn),
            "tuned_wv_nn" => Some(Variant::TunedWvNn),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::BowGbt => "bow_gbt",
            Variant::MeanWvNn => "mean_wv_nn",
            Variant::ExternalWvNn => "external_wv_nn",
            Variant::TunedWvNn => "tuned_wv_nn",
        }
    }
}

/// Every knob the pipeline exposes, with the benchmark defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub retrieval: RetrievalConfig,
    pub matcher: TreeConfig,
    pub trust: TrustWeights,
    pub ratio_min_support: u32,
    /// labeled pairs drawn for matcher training
    pub matcher_pairs: usize,
    pub w2v: W2vConfig,
    pub ffn: FfnConfig,
    /// hidden width of the tuned-variant regressor head
    pub tuned_hidden: usize,
    pub lstm: LstmConfig,
    /// LSTM fine-tuning examples drawn from the external text corpus
    pub lstm_examples: usize,
    pub bow_gbt: GbtConfig,
    pub external_gbt: GbtConfig,
    pub stacking_gbt: GbtConfig,
    /// folds for out-of-fold internal predictions when stacking
    pub stacking_folds: usize,
    /// use in-sample internal predictions for stacking instead of
    /// out-of-fold ones
    pub naive_stacking: bool,
    /// internal variant stacked inside the combined model
    pub combined_internal: Variant,
    pub tau: f64,
    pub cv_folds: usize,
    pub top_k_sources: usize,
    pub threads: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            retrieval: RetrievalConfig::default(),
            matcher: TreeConfig::default(),
            trust: TrustWeights::default(),
            ratio_min_support: 5,
            matcher_pairs: 1000,
            w2v: W2vConfig::default(),
            ffn: FfnConfig {
                hidden: vec![300, 100],
                epochs: 25,
                learning_rate: 0.01,
                batch_size: 32,
                target_scale: 1e5,
                seed: 1,
            },
            tuned_hidden: 200,
            lstm: LstmConfig::default(),
            lstm_examples: 2000,
            bow_gbt: GbtConfig {
                rounds: 300,
                depth: 5,
                learning_rate: 0.01,
                min_leaf: 5,
            },
            external_gbt: GbtConfig {
                rounds: 700,
                depth: 5,
                learning_rate: 0.003,
                min_leaf: 5,
            },
            stacking_gbt: GbtConfig {
                rounds: 300,
                depth: 5,
                learning_rate: 0.01,
                min_leaf: 5,
            },
            stacking_folds: 5,
            naive_stacking: false,
            combined_internal: Variant::MeanWvNn,
            tau: 0.15,
            cv_folds: 5,
            top_k_sources: SOURCE_SLOTS,
            threads: 1,
            seed: 42,
        }
    }
}

/// Everything the external model needs besides its GBT: the searchable
/// index, extracted records, canonicalization and industry tables, the
/// ratio table, and the trained matcher.
#[derive(Debug, Clone)]
pub struct ExternalContext {
    pub index: CorpusIndex,
    pub records: BTreeMap<String, SourceRecord>,
    pub record_industry: BTreeMap<String, Option<Industry>>,
    pub aliases: AliasTable,
    pub industries: IndustryTable,
    pub ratios: RatioTable,
    pub matcher: PairDecisionTree,
    pub retrieval: RetrievalConfig,
    pub extraction_errors: usize,
}

/// Build matcher training pairs from co-reference labels.
pub fn matcher_pairs_from_labels(
    labels: &[MatchLabel],
    identities: &BTreeMap<&str, &Identity>,
    records: &BTreeMap<String, SourceRecord>,
    aliases: &AliasTable,
    industries: &IndustryTable,
    max_pairs: usize,
) -> Vec<(crate::matching::MatchFeatures, bool)> {
    let mut pairs = Vec::new();
    for label in labels {
        if pairs.len() >= max_pairs {
            break;
        }
        let Some(identity) = identities.get(label.identity_id.as_str()) else {
            continue;
        };
        let Some(record) = records.get(&label.record_id) else {
            continue;
        };
        let features = compute_features(identity, &record.fragment, aliases, industries);
        pairs.push((features, label.label));
    }
    pairs
}

/// Assemble the external context: extract the corpus, infer per-record
/// industries, build the ratio table and the retrieval index, and train the
/// record matcher from labeled pairs.
#[allow(clippy::too_many_arguments)]
pub fn build_external_context(
    corpus: &SourceCorpus,
    aliases: AliasTable,
    industries: IndustryTable,
    specs: &PathSpecs,
    patterns: &PatternSet,
    labels: &[MatchLabel],
    label_identities: &BTreeMap<&str, &Identity>,
    config: &PipelineConfig,
) -> Result<ExternalContext> {
    let (records, errors) = extract_corpus(corpus, specs, patterns, &config.trust);
    let record_industry: BTreeMap<String, Option<Industry>> = records
        .iter()
        .map(|(id, record)| {
            let industry = record
                .fragment
                .employer
                .as_deref()
                .map(|e| aliases.canonicalize(e, AliasKind::Employer))
                .and_then(|e| industries.infer(&e));
            (id.clone(), industry)
        })
        .collect();
    let ratios = build_ratio_table(
        records
            .values()
            .filter(|r| !r.is_discardable())
            .map(|r| (record_industry[&r.id], r.attributes)),
        config.ratio_min_support,
    );
    let pairs = matcher_pairs_from_labels(
        labels,
        label_identities,
        &records,
        &aliases,
        &industries,
        config.matcher_pairs,
    );
    if pairs.len() < 2 {
        return Err(Error::InvalidInput(
            "matcher training needs at least 2 labeled pairs with known identities and records"
                .into(),
        ));
    }
    let matcher = train_matcher(&pairs, config.matcher)?;
    Ok(ExternalContext {
        index: CorpusIndex::build(corpus),
        records,
        record_industry,
        aliases,
        industries,
        ratios,
        matcher,
        retrieval: config.retrieval,
        extraction_errors: errors.len(),
    })
}

/// Retrieve, extract, and score candidate records for one identity.
pub fn match_record_candidates(identity: &Identity, ctx: &ExternalContext) -> Vec<MatchResult> {
    let candidates = retrieve_candidates(identity, &ctx.index, &ctx.industries, &ctx.retrieval);
    let mut results = Vec::with_capacity(candidates.len());
    for candidate in candidates {
        let Some(record) = ctx.records.get(&candidate.record_id) else {
            continue;
        };
        if record.is_discardable() {
            continue;
        }
        let features = compute_features(identity, &record.fragment, &ctx.aliases, &ctx.industries);
        results.push(score_pair(&ctx.matcher, &record.id, features));
    }
    results
}

/// Full 35-dimensional external vector for one identity. Errors when the
/// identity has no stated income.
pub fn external_vector(identity: &Identity, ctx: &ExternalContext) -> Result<ExternalFeatureVector> {
    let stated = identity.stated_income.ok_or_else(|| {
        Error::Contract("external features require a stated income".into())
    })?;
    let matches = match_record_candidates(identity, ctx);
    let attrs: BTreeMap<String, (Option<Industry>, crate::extract::SalaryAttributes)> = matches
        .iter()
        .filter_map(|m| {
            ctx.records
                .get(&m.record_id)
                .map(|r| (m.record_id.clone(), (ctx.record_industry[&m.record_id], r.attributes)))
        })
        .collect();
    build_external_features(stated, &matches, &attrs, &ctx.ratios)
}

/// Cached external vectors by identity id; `None` marks identities without
/// a stated income.
#[derive(Debug, Clone, Default)]
pub struct FeatureCache {
    pub vectors: BTreeMap<String, Option<ExternalFeatureVector>>,
}

impl FeatureCache {
    pub fn get(&self, id: &str) -> Option<&ExternalFeatureVector> {
        self.vectors.get(id).and_then(|v| v.as_ref())
    }
}

/// Featurize a set of examples, optionally across threads. Results are
/// keyed by id, so thread count never changes the output.
pub fn build_feature_cache(
    examples: &[LabeledExample],
    ctx: &ExternalContext,
    threads: usize,
) -> Result<FeatureCache> {
    let one = |ex: &LabeledExample| -> Result<(String, Option<ExternalFeatureVector>)> {
        let vector = match ex.identity.stated_income {
            Some(_) => Some(external_vector(&ex.identity, ctx)?),
            None => None,
        };
        Ok((ex.id.clone(), vector))
    };
    let mut vectors = BTreeMap::new();
    if threads <= 1 || examples.len() < 2 {
        for ex in examples {
            let (id, vector) = one(ex)?;
            vectors.insert(id, vector);
        }
    } else {
        let chunk = examples.len().div_ceil(threads);
        let results: Vec<Result<Vec<(String, Option<ExternalFeatureVector>)>>> =
            std::thread::scope(|scope| {
                let handles: Vec<_> = examples
                    .chunks(chunk)
                    .map(|part| {
                        scope.spawn(move || {
                            part.iter().map(one).collect::<Result<Vec<_>>>()
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().unwrap()).collect()
            });
        for result in results {
            for (id, vector) in result? {
                vectors.insert(id, vector);
            }
        }
    }
    Ok(FeatureCache { vectors })
}

/// 50-slot one-hot state encoding; unknown or absent states are all zeros.
pub fn state_onehot(state: Option<&str>) -> Vec<f64> {
    let mut out = vec![0.0; 50];
    if let Some(slot) = state.and_then(state_slot) {
        out[slot] = 1.0;
    }
    out
}

/// Mean-word-vector input: title mean, employer mean, state one-hot.
pub fn wv_input(title_emb: &Embeddings, employer_emb: &Embeddings, row: &RedactedIdentity) -> Vec<f64> {
    let mut out = Vec::with_capacity(WV_INPUT_DIM);
    out.extend(title_emb.embed_mean(&tokenize(&row.job_title)));
    out.extend(employer_emb.embed_mean(&tokenize(&row.employer)));
    out.extend(state_onehot(row.state.as_deref()));
    assert_eq!(out.len(), WV_INPUT_DIM, "internal input must be 650-dimensional");
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WvNnModel {
    pub title_emb: Embeddings,
    pub employer_emb: Embeddings,
    pub ffn: Ffn,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum InternalModel {
    BowGbt {
        featurizer: BowFeaturizer,
        gbt: GbtEnsemble,
    },
    WvNn {
        variant: Variant,
        model: WvNnModel,
    },
}

impl InternalModel {
    pub fn variant(&self) -> Variant {
        match self {
            InternalModel::BowGbt { .. } => Variant::BowGbt,
            InternalModel::WvNn { variant, .. } => *variant,
        }
    }

    /// Dollar prediction from redacted inputs only.
    pub fn predict(&self, row: &RedactedIdentity) -> Result<f64> {
        match self {
            InternalModel::BowGbt { featurizer, gbt } => {
                let features = featurizer.featurize(row);
                debug_assert_eq!(features.len(), BOW_DIM);
                gbt.predict(&features)
            }
            InternalModel::WvNn { model, .. } => {
                let input = wv_input(&model.title_emb, &model.employer_emb, row);
                model.ffn.predict(&input)
            }
        }
    }
}

fn title_sentences(rows: &[RedactedIdentity]) -> Vec<Vec<String>> {
    rows.iter().map(|r| tokenize(&r.job_title)).filter(|t| !t.is_empty()).collect()
}

fn employer_sentences(rows: &[RedactedIdentity]) -> Vec<Vec<String>> {
    rows.iter().map(|r| tokenize(&r.employer)).filter(|t| !t.is_empty()).collect()
}

/// Train an internal variant. Only redacted fields feed features; the
/// external text corpus backs the `external_wv_nn` and `tuned_wv_nn`
/// variants' embedding pre-training.
pub fn train_internal(
    train: &[LabeledExample],
    variant: Variant,
    external_text: &[ExternalTextRow],
    config: &PipelineConfig,
) -> Result<InternalModel> {
    if train.is_empty() {
        return Err(Error::Contract("internal training set is empty".into()));
    }
    let rows: Vec<RedactedIdentity> = train.iter().map(|ex| ex.identity.redact()).collect();
    let targets: Vec<f64> = train.iter().map(|ex| ex.true_income.as_dollars_f64()).collect();

    match variant {
        Variant::BowGbt => {
            let featurizer = BowFeaturizer::fit(&rows);
            let xs: Vec<Vec<f64>> = rows.iter().map(|r| featurizer.featurize(r)).collect();
            let gbt = gbt_train(&xs, &targets, &config.bow_gbt)?;
            Ok(InternalModel::BowGbt { featurizer, gbt })
        }
        Variant::MeanWvNn | Variant::ExternalWvNn | Variant::TunedWvNn => {
            let mut title_corpus = title_sentences(&rows);
            let mut employer_corpus = employer_sentences(&rows);
            if variant != Variant::MeanWvNn {
                title_corpus.extend(external_text.iter().map(|r| tokenize(&r.job_title)));
                employer_corpus.extend(external_text.iter().map(|r| tokenize(&r.employer)));
            }
            let mut w2v_title = config.w2v.clone();
            w2v_title.seed = config.w2v.seed ^ 0x7469746c65; // per-field stream
            let mut w2v_employer = config.w2v.clone();
            w2v_employer.seed = config.w2v.seed ^ 0x656d70;
            let mut title_emb = train_word_vectors(&title_corpus, &w2v_title)?;
            let employer_emb = train_word_vectors(&employer_corpus, &w2v_employer)?;

            if variant == Variant::TunedWvNn {
                // tune the title vectors by regressing income on the title
                // sequence over the external corpus
                let take = config.lstm_examples.min(external_text.len());
                if take > 0 {
                    let sequences: Vec<Vec<String>> = external_text[..take]
                        .iter()
                        .map(|r| tokenize(&r.job_title))
                        .collect();
                    let ys: Vec<f64> = external_text[..take]
                        .iter()
                        .map(|r| r.income.as_dollars_f64())
                        .collect();
                    let (lstm, _report) =
                        lstm_regress_train(&sequences, title_emb, &ys, &config.lstm)?;
                    title_emb = lstm.embeddings;
                }
            }

            let xs: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| wv_input(&title_emb, &employer_emb, r))
                .collect();
            let mut ffn_config = config.ffn.clone();
            if variant == Variant::TunedWvNn {
                ffn_config.hidden = vec![config.tuned_hidden];
            }
            let (ffn, _trace) = ffn_train(&xs, &targets, &ffn_config)?;
            Ok(InternalModel::WvNn {
                variant,
                model: WvNnModel {
                    title_emb,
                    employer_emb,
                    ffn,
                },
            })
        }
    }
}

/// Salary attribute groups for the external-feature ablation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SalaryGroup {
    Low,
    Median,
    High,
}

impl SalaryGroup {
    pub const ALL: [SalaryGroup; 3] = [SalaryGroup::Low, SalaryGroup::Median, SalaryGroup::High];

    pub fn label(self) -> &'static str {
        match self {
            SalaryGroup::Low => "Low",
            SalaryGroup::Median => "Median",
            SalaryGroup::High => "High",
        }
    }

    /// In-slot attribute offsets removed by dropping this group.
    fn slot_offsets(self) -> [usize; 2] {
        match self {
            SalaryGroup::Low => [0, 3],    // base_low, total_low
            SalaryGroup::Median => [1, 4], // base_median, total_median
            SalaryGroup::High => [2, 5],   // base_high, total_high
        }
    }
}

/// Project the full external vector onto the first `top_k` source slots,
/// removing any dropped salary-attribute groups.
pub fn slice_external(
    vector: &ExternalFeatureVector,
    top_k: usize,
    dropped: &[SalaryGroup],
) -> Vec<f64> {
    let values = vector.as_slice();
    let mut out = Vec::with_capacity(top_k * 7);
    let removed: Vec<usize> = dropped.iter().flat_map(|g| g.slot_offsets()).collect();
    for slot in 0..top_k.min(SOURCE_SLOTS) {
        let base = slot * 7;
        for offset in 0..7 {
            if offset < 6 && removed.contains(&offset) {
                continue;
            }
            out.push(values[base + offset]);
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExternalModel {
    pub gbt: GbtEnsemble,
    pub top_k: usize,
    pub dropped: Vec<SalaryGroup>,
    /// training rows excluded for lacking a stated income
    pub excluded_rows: usize,
}

impl ExternalModel {
    pub fn predict_from_vector(&self, vector: &ExternalFeatureVector) -> Result<f64> {
        self.gbt.predict(&slice_external(vector, self.top_k, &self.dropped))
    }
}

/// Train the external-records model on cached features.
pub fn train_external(
    train: &[LabeledExample],
    cache: &FeatureCache,
    gbt_config: &GbtConfig,
    top_k: usize,
    dropped: &[SalaryGroup],
) -> Result<ExternalModel> {
    let mut xs = Vec::with_capacity(train.len());
    let mut ys = Vec::with_capacity(train.len());
    let mut excluded = 0usize;
    for ex in train {
        match cache.get(&ex.id) {
            Some(vector) => {
                xs.push(slice_external(vector, top_k, dropped));
                ys.push(ex.true_income.as_dollars_f64());
            }
            None => excluded += 1,
        }
    }
    if xs.is_empty() {
        return Err(Error::InvalidInput(
            "external training needs rows with stated incomes".into(),
        ));
    }
    let gbt = gbt_train(&xs, &ys, gbt_config)?;
    Ok(ExternalModel {
        gbt,
        top_k,
        dropped: dropped.to_vec(),
        excluded_rows: excluded,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CombinedModel {
    pub internal: InternalModel,
    pub stacking: GbtEnsemble,
}

/// Deterministic k-fold index partition.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::Contract(format!("k-fold needs k >= 2, got {k}")));
    }
    if k > n {
        return Err(Error::Contract(format!(
            "k-fold needs k <= n, got k {k} over {n} examples"
        )));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    Rng::new(seed).shuffle(&mut indices);
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut at = 0usize;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds.push(indices[at..at + size].to_vec());
        at += size;
    }
    Ok(folds)
}

/// Train the combined model: out-of-fold internal predictions stacked with
/// the 35 external features feed a gradient boosted tree.
pub fn train_combined(
    train: &[LabeledExample],
    cache: &FeatureCache,
    variant: Variant,
    external_text: &[ExternalTextRow],
    config: &PipelineConfig,
) -> Result<CombinedModel> {
    if train.is_empty() {
        return Err(Error::Contract("combined training set is empty".into()));
    }
    // internal predictions for stacking
    let mut internal_preds = vec![0.0f64; train.len()];
    if config.naive_stacking || train.len() < config.stacking_folds {
        let internal = train_internal(train, variant, external_text, config)?;
        for (i, ex) in train.iter().enumerate() {
            internal_preds[i] = internal.predict(&ex.identity.redact())?;
        }
    } else {
        let folds = kfold_indices(
            train.len(),
            config.stacking_folds,
            Rng::new(config.seed).fork("stacking").next_u64(),
        )?;
        for fold in &folds {
            let holdout: std::collections::BTreeSet<usize> = fold.iter().copied().collect();
            let fit_rows: Vec<LabeledExample> = train
                .iter()
                .enumerate()
                .filter(|(i, _)| !holdout.contains(i))
                .map(|(_, ex)| ex.clone())
                .collect();
            let fold_model = train_internal(&fit_rows, variant, external_text, config)?;
            for &i in fold {
                internal_preds[i] = fold_model.predict(&train[i].identity.redact())?;
            }
        }
    }

    let mut xs = Vec::with_capacity(train.len());
    let mut ys = Vec::with_capacity(train.len());
    for (i, ex) in train.iter().enumerate() {
        let Some(vector) = cache.get(&ex.id) else {
            continue; // stacking requires the external half
        };
        let mut features = vector.as_slice().to_vec();
        features.push(internal_preds[i]);
        debug_assert_eq!(features.len(), STACKED_DIM);
        xs.push(features);
        ys.push(ex.true_income.as_dollars_f64());
    }
    if xs.is_empty() {
        return Err(Error::InvalidInput(
            "combined training needs rows with stated incomes".into(),
        ));
    }
    let stacking = gbt_train(&xs, &ys, &config.stacking_gbt)?;
    // final internal model trained on the full set
    let internal = train_internal(train, variant, external_text, config)?;
    Ok(CombinedModel { internal, stacking })
}

impl CombinedModel {
    pub fn predict_from_parts(
        &self,
        vector: &ExternalFeatureVector,
        internal_pred: f64,
    ) -> Result<f64> {
        let mut features = vector.as_slice().to_vec();
        features.push(internal_pred);
        self.stacking.predict(&features)
    }
}

/// A trained model of any flavor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Model {
    Internal(InternalModel),
    External(ExternalModel),
    Combined(CombinedModel),
}

/// Predict an income in money terms. External and combined models featurize
/// the identity against the context; the internal model never sees more
/// than the redacted view.
pub fn predict_income(model: &Model, identity: &Identity, ctx: &ExternalContext) -> Result<Money> {
    let dollars = match model {
        Model::Internal(internal) => internal.predict(&identity.redact())?,
        Model::External(external) => {
            let vector = external_vector(identity, ctx)?;
            external.predict_from_vector(&vector)?
        }
        Model::Combined(combined) => {
            let vector = external_vector(identity, ctx)?;
            let internal_pred = combined.internal.predict(&identity.redact())?;
            combined.predict_from_parts(&vector, internal_pred)?
        }
    };
    Ok(Money::from_dollars_f64(dollars.max(0.0)))
}

/// Outcome of checking a stated income against a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationDecision {
    pub predicted: Money,
    pub stated: Money,
    pub relative_gap: f64,
    pub verified: bool,
    pub tau: f64,
}

/// Verified iff |stated - predicted| <= tau * predicted.
pub fn verify_income(predicted: Money, stated: Money, tau: f64) -> Result<VerificationDecision> {
    if predicted.is_zero() || stated.is_zero() {
        return Err(Error::Contract(
            "verification requires positive predicted and stated incomes".into(),
        ));
    }
    if tau < 0.0 {
        return Err(Error::Contract(format!("tau must be >= 0, got {tau}")));
    }
    let gap = stated.abs_diff(predicted).as_dollars_f64();
    let relative_gap = gap / predicted.as_dollars_f64();
    Ok(VerificationDecision {
        predicted,
        stated,
        relative_gap,
        verified: relative_gap <= tau,
        tau,
    })
}
