//! Command-line entry point for the income verification pipeline.
//!
//! Exit codes: 0 success, 1 validation/usage error, 2 runtime failure.

mod reports;
mod runcfg;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use incomeverify::datagen::dataset::{
    save_dataset, save_external_text, save_match_labels,
};
use incomeverify::datagen::corpus::save_corpus;
use incomeverify::datagen::hib::{ingest_hib, sample_examples, ColumnMap};
use incomeverify::datagen::{generate_synthetic, SynthConfig};
use incomeverify::defaults;
use incomeverify::domain::Identity;
use incomeverify::extract::PatternSet;
use incomeverify::matching::{classification_f1, PairDecisionTree};
use incomeverify::pipeline::ablate::{ablate, Study};
use incomeverify::pipeline::eval::{evaluate, EvalInputs, ModelSpec};
use incomeverify::pipeline::{
    build_external_context, build_feature_cache, matcher_pairs_from_labels, predict_income,
    train_combined, train_external, train_internal, verify_income, ExternalContext, Model,
    Variant,
};
use incomeverify::retrieval::CorpusIndex;

use reports::{write_ablation_csv, write_eval_csv, write_manifest, write_verification_csv};
use runcfg::{load_data, LoadedData, RunConfig};

#[derive(Parser)]
#[command(
    name = "incomeverify",
    about = "Income verification from identity input and a local corpus of public salary records",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded synthetic benchmark: datasets, corpus, labels, tables.
    Synth(SynthArgs),
    /// Ingest an H-1B disclosure CSV into a dataset file.
    Ingest(IngestArgs),
    /// Build the retrieval index for a corpus.
    Index(IndexArgs),
    /// Train the record matcher from labeled identity/record pairs.
    TrainMatcher(TrainMatcherArgs),
    /// Train a model variant and save its artifacts.
    Train(TrainArgs),
    /// Predict the income for one identity JSON document.
    Predict(PredictArgs),
    /// Verify a stated income against the model prediction.
    Verify(VerifyArgs),
    /// Produce the model-comparison and verification report CSVs.
    Evaluate(EvaluateArgs),
    /// Run an ablation study and write its report CSV.
    Ablate(AblateArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory for datasets, corpus, tables, and run config.
    #[arg(long)]
    out_dir: PathBuf,
    /// Dataset shape preset.
    #[arg(long, default_value = "client", value_parser = ["client", "hib"])]
    preset: String,
    /// Generator seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Synthetic-generator config JSON overriding the preset.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    /// Disclosure CSV file.
    #[arg(long)]
    csv: PathBuf,
    /// Column-map JSON file.
    #[arg(long)]
    column_map: PathBuf,
    /// Output dataset CSV.
    #[arg(long)]
    out: PathBuf,
    /// Keep a uniform sample of this many rows.
    #[arg(long)]
    sample_n: Option<usize>,
    /// Seed for the sampling shuffle.
    #[arg(long, default_value_t = 1)]
    sample_seed: u64,
}

#[derive(Args)]
struct IndexArgs {
    /// Corpus JSONL file or directory.
    #[arg(long)]
    corpus: PathBuf,
    /// Where to write the index.
    #[arg(long)]
    index_out: PathBuf,
}

#[derive(Args)]
struct TrainMatcherArgs {
    /// Run config naming datasets, corpus, and match labels.
    #[arg(long)]
    config: PathBuf,
    /// Where to write the trained matcher.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Run config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Model to train.
    #[arg(long, value_parser = parse_spec)]
    variant: ModelSpec,
    /// Output directory for model artifacts.
    #[arg(long)]
    out_dir: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for featurization (training stays single-threaded).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct PredictArgs {
    /// Run config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Directory holding trained model artifacts.
    #[arg(long)]
    models: PathBuf,
    /// Identity JSON document.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Directory holding trained model artifacts.
    #[arg(long)]
    models: PathBuf,
    /// Identity JSON document (must carry a stated income).
    #[arg(long)]
    input: PathBuf,
    /// Verification threshold override.
    #[arg(long)]
    tau: Option<f64>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Run config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated model list, or "all".
    #[arg(long, default_value = "all")]
    variant: String,
    /// Output directory for report CSVs.
    #[arg(long)]
    out_dir: PathBuf,
    /// Skip cross-validation (test metrics only).
    #[arg(long)]
    no_cv: bool,
    /// Also dump per-identity external feature vectors to this CSV.
    #[arg(long)]
    dump_features: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for featurization.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct AblateArgs {
    /// Run config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Which study to run.
    #[arg(long, value_parser = parse_study)]
    study: Study,
    /// Output directory for the report CSV.
    #[arg(long)]
    out_dir: PathBuf,
    /// Skip cross-validation.
    #[arg(long)]
    no_cv: bool,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for featurization.
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_spec(s: &str) -> Result<ModelSpec, String> {
    ModelSpec::parse(s).ok_or_else(|| {
        format!(
            "unknown variant {s:?}; expected one of bow_gbt, mean_wv_nn, external_wv_nn, \
             tuned_wv_nn, external_gbt, combined"
        )
    })
}

fn parse_study(s: &str) -> Result<Study, String> {
    Study::parse(s).ok_or_else(|| {
        format!("unknown study {s:?}; expected sources_count, input_features, or salary_features")
    })
}

/// Validation failures exit 1; everything else that goes wrong exits 2.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<incomeverify::Error>() {
        Some(incomeverify::Error::Config(_)) | Some(incomeverify::Error::InvalidInput(_)) => 1,
        Some(_) => 2,
        None => {
            // config parse errors and bad user files are validation failures
            if err.chain().any(|c| {
                c.downcast_ref::<serde_json::Error>().is_some()
                    || c.to_string().contains("parsing config")
            }) {
                1
            } else {
                2
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successes; everything else is usage
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Ingest(args) => cmd_ingest(args),
        Command::Index(args) => cmd_index(args),
        Command::TrainMatcher(args) => cmd_train_matcher(args),
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Ablate(args) => cmd_ablate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let mut config = match args.preset.as_str() {
        "hib" => SynthConfig::hib_preset(42),
        _ => SynthConfig::default(),
    };
    if let Some(path) = &args.config {
        let body = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        config = serde_json::from_str(&body)
            .with_context(|| format!("parsing config {}", path.display()))?;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let out = generate_synthetic(&config)?;

    let dir = &args.out_dir;
    let train_path = dir.join("train.csv");
    let test_path = dir.join("test.csv");
    let corpus_path = dir.join("corpus.jsonl");
    let labels_path = dir.join("match_labels.csv");
    let external_path = dir.join("external_text.csv");
    let alias_path = dir.join("alias_table.csv");
    let industry_path = dir.join("industry_table.csv");
    let patterns_path = dir.join("patterns.json");
    let specs_path = dir.join("path_specs.json");
    let runcfg_path = dir.join("run_config.json");

    save_dataset(&out.train, &train_path)?;
    save_dataset(&out.test, &test_path)?;
    save_corpus(&out.corpus, &corpus_path)?;
    save_match_labels(&out.match_labels, &labels_path)?;
    save_external_text(&out.external_text, &external_path)?;
    defaults::alias_table().save_csv(&alias_path)?;
    defaults::industry_table().save_csv(&industry_path)?;
    PatternSet::save_json(&defaults::pattern_defs(), &patterns_path)?;
    defaults::path_specs().save_json(&specs_path)?;

    // a ready-to-use run config pointing at the generated files
    let run_config = RunConfig {
        paths: runcfg::RunPaths {
            train: Some("train.csv".into()),
            test: Some("test.csv".into()),
            corpus: Some("corpus.jsonl".into()),
            match_labels: Some("match_labels.csv".into()),
            external_text: Some("external_text.csv".into()),
            alias_table: Some("alias_table.csv".into()),
            industry_table: Some("industry_table.csv".into()),
            pattern_file: Some("patterns.json".into()),
            path_specs: Some("path_specs.json".into()),
            index: None,
        },
        pipeline: incomeverify::pipeline::PipelineConfig {
            seed: config.seed,
            ..Default::default()
        },
    };
    std::fs::write(&runcfg_path, serde_json::to_string_pretty(&run_config)?)?;

    let outputs = vec![
        train_path.clone(),
        test_path,
        corpus_path,
        labels_path,
        external_path,
        alias_path,
        industry_path,
        patterns_path,
        specs_path,
        runcfg_path,
    ];
    write_manifest("synth", &config, &BTreeMap::new(), &outputs, &dir.join("manifest.json"))?;
    println!(
        "wrote {} train rows, {} test rows, {} corpus records to {}",
        out.train.len(),
        out.test.len(),
        out.corpus.len(),
        dir.display()
    );
    Ok(())
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    let columns = ColumnMap::load_json(&args.column_map)?;
    let report = ingest_hib(&args.csv, &columns)?;
    let examples = match args.sample_n {
        Some(n) => sample_examples(report.examples, n, args.sample_seed),
        None => report.examples,
    };
    save_dataset(&examples, &args.out)?;
    let mut inputs = BTreeMap::new();
    inputs.insert("csv".to_string(), args.csv.clone());
    inputs.insert("column_map".to_string(), args.column_map.clone());
    let manifest_path = args.out.with_extension("manifest.json");
    write_manifest(
        "ingest",
        &serde_json::json!({
            "column_map": columns,
            "sample_n": args.sample_n,
            "sample_seed": args.sample_seed,
            "skipped_rows": report.skipped,
            "total_rows": report.total_rows,
        }),
        &inputs,
        &[args.out.clone()],
        &manifest_path,
    )?;
    println!(
        "ingested {} rows ({} skipped of {}) into {}",
        examples.len(),
        report.skipped,
        report.total_rows,
        args.out.display()
    );
    Ok(())
}

fn cmd_index(args: IndexArgs) -> Result<()> {
    let report = incomeverify::datagen::corpus::load_corpus(&args.corpus)?;
    if !report.errors.is_empty() {
        eprintln!("warning: {} malformed corpus lines skipped", report.errors.len());
    }
    let index = CorpusIndex::build(&report.corpus);
    index.save_json(&args.index_out)?;
    println!(
        "indexed {} records into {}",
        report.corpus.len(),
        args.index_out.display()
    );
    Ok(())
}

/// Common preparation: load config + data, build the external context.
struct Prepared {
    config: RunConfig,
    data: LoadedData,
    ctx: ExternalContext,
}

fn prepare(config_path: &Path, seed: Option<u64>, threads: Option<usize>) -> Result<Prepared> {
    let mut config = RunConfig::load(config_path)?;
    if let Some(seed) = seed {
        config.pipeline.seed = seed;
    }
    if let Some(threads) = threads {
        config.pipeline.threads = threads.max(1);
    }
    let base = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let data = load_data(&config, &base)?;
    let identities: BTreeMap<&str, &Identity> = data
        .train
        .iter()
        .chain(data.test.iter())
        .map(|ex| (ex.id.as_str(), &ex.identity))
        .collect();
    let ctx = build_external_context(
        &data.corpus,
        data.aliases.clone(),
        data.industries.clone(),
        &data.specs,
        &data.patterns,
        &data.match_labels,
        &identities,
        &config.pipeline,
    )?;
    Ok(Prepared { config, data, ctx })
}

fn cmd_train_matcher(args: TrainMatcherArgs) -> Result<()> {
    let prepared = prepare(&args.config, None, None)?;
    prepared.ctx.matcher.save_json(&args.out)?;
    // report training-set accuracy over all labeled pairs
    let identities: BTreeMap<&str, &Identity> = prepared
        .data
        .train
        .iter()
        .chain(prepared.data.test.iter())
        .map(|ex| (ex.id.as_str(), &ex.identity))
        .collect();
    let pairs = matcher_pairs_from_labels(
        &prepared.data.match_labels,
        &identities,
        &prepared.ctx.records,
        &prepared.ctx.aliases,
        &prepared.ctx.industries,
        usize::MAX,
    );
    let (precision, recall, f1) = classification_f1(&prepared.ctx.matcher, &pairs);
    println!(
        "matcher trained on {} pairs (cap {}); all-pair P {precision:.4} R {recall:.4} F1 {f1:.4}; saved to {}",
        pairs.len().min(prepared.config.pipeline.matcher_pairs),
        prepared.config.pipeline.matcher_pairs,
        args.out.display()
    );
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let prepared = prepare(&args.config, args.seed, args.threads)?;
    let Prepared { config, data, ctx } = &prepared;
    std::fs::create_dir_all(&args.out_dir)?;

    let all: Vec<_> = data.train.iter().chain(data.test.iter()).cloned().collect();
    let cache = build_feature_cache(&all, ctx, config.pipeline.threads)?;

    let model = match args.variant {
        ModelSpec::BowGbt => Model::Internal(train_internal(
            &data.train,
            Variant::BowGbt,
            &data.external_text,
            &config.pipeline,
        )?),
        ModelSpec::MeanWvNn => Model::Internal(train_internal(
            &data.train,
            Variant::MeanWvNn,
            &data.external_text,
            &config.pipeline,
        )?),
        ModelSpec::ExternalWvNn => Model::Internal(train_internal(
            &data.train,
            Variant::ExternalWvNn,
            &data.external_text,
            &config.pipeline,
        )?),
        ModelSpec::TunedWvNn => Model::Internal(train_internal(
            &data.train,
            Variant::TunedWvNn,
            &data.external_text,
            &config.pipeline,
        )?),
        ModelSpec::ExternalGbt => Model::External(train_external(
            &data.train,
            &cache,
            &config.pipeline.external_gbt,
            config.pipeline.top_k_sources,
            &[],
        )?),
        ModelSpec::Combined => Model::Combined(train_combined(
            &data.train,
            &cache,
            config.pipeline.combined_internal,
            &data.external_text,
            &config.pipeline,
        )?),
    };

    let model_path = args.out_dir.join("model.json");
    std::fs::write(
        &model_path,
        serde_json::to_string(&serde_json::json!({
            "spec": args.variant.as_str(),
            "model": model,
        }))?,
    )?;
    let matcher_path = args.out_dir.join("matcher.json");
    ctx.matcher.save_json(&matcher_path)?;
    let ratios_path = args.out_dir.join("ratios.json");
    ctx.ratios.save_json(&ratios_path)?;

    write_manifest(
        "train",
        &serde_json::json!({"variant": args.variant.as_str(), "pipeline": config.pipeline}),
        &data.input_files,
        &[model_path, matcher_path, ratios_path],
        &args.out_dir.join("manifest.json"),
    )?;
    println!("trained {} into {}", args.variant.label(), args.out_dir.display());
    Ok(())
}

fn load_model(models_dir: &Path) -> Result<(ModelSpec, Model)> {
    let body = std::fs::read_to_string(models_dir.join("model.json"))
        .with_context(|| format!("reading {}/model.json", models_dir.display()))?;
    let value: serde_json::Value = serde_json::from_str(&body)?;
    let spec = value
        .get("spec")
        .and_then(|s| s.as_str())
        .and_then(ModelSpec::parse)
        .ok_or_else(|| anyhow!("model.json is missing a valid spec"))?;
    let model: Model = serde_json::from_value(
        value
            .get("model")
            .cloned()
            .ok_or_else(|| anyhow!("model.json is missing the model body"))?,
    )?;
    Ok((spec, model))
}

/// Rebuild the external context for prediction, reusing a saved matcher
/// instead of retraining from labels.
fn context_for_prediction(config: &RunConfig, base: &Path, models_dir: &Path) -> Result<(LoadedData, ExternalContext)> {
    let data = load_data(config, base)?;
    let matcher = PairDecisionTree::load_json(&models_dir.join("matcher.json"))?;
    let ctx = build_context_without_matcher(config, &data, matcher)?;
    Ok((data, ctx))
}

fn build_context_without_matcher(
    config: &RunConfig,
    data: &LoadedData,
    matcher: PairDecisionTree,
) -> Result<ExternalContext> {
    use incomeverify::canon::AliasKind;
    use incomeverify::extfeat::build_ratio_table;
    use incomeverify::extract::extract_corpus;

    let (records, errors) = extract_corpus(
        &data.corpus,
        &data.specs,
        &data.patterns,
        &config.pipeline.trust,
    );
    let record_industry: BTreeMap<String, Option<incomeverify::industry::Industry>> = records
        .iter()
        .map(|(id, record)| {
            let industry = record
                .fragment
                .employer
                .as_deref()
                .map(|e| data.aliases.canonicalize(e, AliasKind::Employer))
                .and_then(|e| data.industries.infer(&e));
            (id.clone(), industry)
        })
        .collect();
    let ratios = build_ratio_table(
        records
            .values()
            .filter(|r| !r.is_discardable())
            .map(|r| (record_industry[&r.id], r.attributes)),
        config.pipeline.ratio_min_support,
    );
    Ok(ExternalContext {
        index: CorpusIndex::build(&data.corpus),
        records,
        record_industry,
        aliases: data.aliases.clone(),
        industries: data.industries.clone(),
        ratios,
        matcher,
        retrieval: config.pipeline.retrieval,
        extraction_errors: errors.len(),
    })
}

fn read_identity(path: &Path) -> Result<Identity> {
    let body = std::fs::read_to_string(path)
        .with_context(|| format!("reading identity {}", path.display()))?;
    let identity: Identity = serde_json::from_str(&body)
        .with_context(|| format!("parsing identity {}", path.display()))?;
    // revalidate through the constructor
    Ok(Identity::new(
        identity.name.clone(),
        identity.address.clone(),
        identity.dob,
        identity.employer.clone(),
        identity.job_title.clone(),
        identity.stated_income,
    )?)
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let config = RunConfig::load(&args.config)?;
    let base = args.config.parent().unwrap_or(Path::new(".")).to_path_buf();
    let (_data, ctx) = context_for_prediction(&config, &base, &args.models)?;
    let (_spec, model) = load_model(&args.models)?;
    let identity = read_identity(&args.input)?;
    let predicted = predict_income(&model, &identity, &ctx)?;
    println!(
        "{}",
        serde_json::json!({ "predicted": predicted.as_dollars_f64() })
    );
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let config = RunConfig::load(&args.config)?;
    let base = args.config.parent().unwrap_or(Path::new(".")).to_path_buf();
    let tau = args.tau.unwrap_or(config.pipeline.tau);
    let (_data, ctx) = context_for_prediction(&config, &base, &args.models)?;
    let (_spec, model) = load_model(&args.models)?;
    let identity = read_identity(&args.input)?;
    let stated = identity.stated_income.ok_or_else(|| {
        anyhow!(incomeverify::Error::InvalidInput(
            "verification requires a stated income in the input document".into()
        ))
    })?;
    let predicted = predict_income(&model, &identity, &ctx)?;
    let decision = verify_income(predicted, stated, tau)?;
    println!(
        "{}",
        serde_json::json!({
            "verified": decision.verified,
            "predicted": decision.predicted.as_dollars_f64(),
            "stated": decision.stated.as_dollars_f64(),
            "relative_gap": decision.relative_gap,
            "tau": decision.tau,
        })
    );
    Ok(())
}

fn parse_spec_list(s: &str) -> Result<Vec<ModelSpec>> {
    if s == "all" {
        return Ok(ModelSpec::ALL.to_vec());
    }
    s.split(',')
        .map(|part| {
            parse_spec(part.trim()).map_err(|e| anyhow!(incomeverify::Error::Config(e)))
        })
        .collect()
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let specs = parse_spec_list(&args.variant)?;
    let prepared = prepare(&args.config, args.seed, args.threads)?;
    let Prepared { config, data, ctx } = &prepared;
    if data.test.is_empty() {
        bail!(incomeverify::Error::Config(
            "evaluate needs a test dataset in the config".into()
        ));
    }
    std::fs::create_dir_all(&args.out_dir)?;

    let all: Vec<_> = data.train.iter().chain(data.test.iter()).cloned().collect();
    let cache = build_feature_cache(&all, ctx, config.pipeline.threads)?;

    if let Some(dump) = &args.dump_features {
        dump_feature_csv(&cache, dump)?;
    }

    let inputs = EvalInputs {
        train: &data.train,
        test: &data.test,
        ctx,
        cache: &cache,
        external_text: &data.external_text,
        config: &config.pipeline,
    };
    let (rows, verification) = evaluate(&inputs, &specs, !args.no_cv)?;

    let predictions_path = args.out_dir.join("predictions.csv");
    let verification_path = args.out_dir.join("verification.csv");
    write_eval_csv(&rows, &predictions_path)?;
    write_verification_csv(&verification, &verification_path)?;
    write_manifest(
        "evaluate",
        &serde_json::json!({
            "variants": specs.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            "with_cv": !args.no_cv,
            "pipeline": config.pipeline,
        }),
        &data.input_files,
        &[predictions_path.clone(), verification_path],
        &args.out_dir.join("manifest.json"),
    )?;
    for row in &rows {
        println!(
            "{}: test MAE {:.3}, test MRE {:.3}{}",
            row.model,
            row.test_mae,
            row.test_mre,
            row.cv_mae
                .map(|cv| format!(", CV MAE {cv:.3}"))
                .unwrap_or_default()
        );
    }
    Ok(())
}

fn dump_feature_csv(
    cache: &incomeverify::pipeline::FeatureCache,
    path: &Path,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["identity_id".to_string()];
    header.extend(incomeverify::extfeat::ExternalFeatureVector::column_names());
    w.write_record(&header)?;
    for (id, vector) in &cache.vectors {
        let Some(vector) = vector else { continue };
        let mut row = vec![id.clone()];
        row.extend(vector.as_slice().iter().map(|v| format!("{v:.6}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_ablate(args: AblateArgs) -> Result<()> {
    let prepared = prepare(&args.config, args.seed, args.threads)?;
    let Prepared { config, data, ctx } = &prepared;
    if data.test.is_empty() {
        bail!(incomeverify::Error::Config(
            "ablate needs a test dataset in the config".into()
        ));
    }
    std::fs::create_dir_all(&args.out_dir)?;
    let all: Vec<_> = data.train.iter().chain(data.test.iter()).cloned().collect();
    let cache = build_feature_cache(&all, ctx, config.pipeline.threads)?;
    let inputs = EvalInputs {
        train: &data.train,
        test: &data.test,
        ctx,
        cache: &cache,
        external_text: &data.external_text,
        config: &config.pipeline,
    };
    let rows = ablate(&inputs, args.study, !args.no_cv)?;
    let first_column = match args.study {
        Study::SourcesCount => "# sources",
        Study::InputFeatures | Study::SalaryFeatures => "Features",
    };
    let out_path = args.out_dir.join(format!("{}.csv", args.study.as_str()));
    write_ablation_csv(&rows, first_column, &out_path)?;
    write_manifest(
        "ablate",
        &serde_json::json!({
            "study": args.study.as_str(),
            "with_cv": !args.no_cv,
            "pipeline": config.pipeline,
        }),
        &data.input_files,
        &[out_path.clone()],
        &args.out_dir.join("manifest.json"),
    )?;
    for row in &rows {
        println!("{}: test MAE {:.3}", row.label, row.test_mae);
    }
    Ok(())
}
