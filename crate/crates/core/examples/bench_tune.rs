// scratch harness for benchmark calibration; removed before release
use std::collections::BTreeMap;
use std::time::Instant;

use incomeverify::datagen::{generate_synthetic, SynthConfig};
use incomeverify::defaults;
use incomeverify::domain::Identity;
use incomeverify::metrics::mae_mre_dollars;
use incomeverify::money::Money;
use incomeverify::pipeline::ablate::{ablate, Study};
use incomeverify::pipeline::eval::{evaluate, EvalInputs, ModelSpec};
use incomeverify::pipeline::{
    build_external_context, build_feature_cache, external_vector, matcher_pairs_from_labels,
    PipelineConfig,
};
use incomeverify::matching::{classification_f1, train_matcher};

fn main() {
    let t0 = Instant::now();
    let synth_config = SynthConfig::default();
    let out = generate_synthetic(&synth_config).unwrap();
    println!("[{:?}] synth: {} train, {} test, {} corpus records, {} labels",
        t0.elapsed(), out.train.len(), out.test.len(), out.corpus.len(), out.match_labels.len());

    let stats = incomeverify::metrics::dataset_stats(
        &out.train.iter().map(|e| e.true_income).collect::<Vec<_>>()).unwrap();
    println!("train stats: mean {} stddev {} skew {:.3}", stats.mean, stats.stddev, stats.skew);

    let config = PipelineConfig::default();
    let identities: BTreeMap<&str, &Identity> = out.train.iter().chain(out.test.iter())
        .map(|ex| (ex.id.as_str(), &ex.identity)).collect();
    let ctx = build_external_context(
        &out.corpus, defaults::alias_table(), defaults::industry_table(),
        &defaults::path_specs(), &defaults::pattern_set(),
        &out.match_labels, &identities, &config).unwrap();
    println!("[{:?}] context built, extraction errors: {}", t0.elapsed(), ctx.extraction_errors);

    // matcher held-out F1
    {
        let pairs = matcher_pairs_from_labels(&out.match_labels, &identities, &ctx.records,
            &ctx.aliases, &ctx.industries, usize::MAX);
        let n = pairs.len();
        let split = n * 4 / 5;
        let mut order: Vec<usize> = (0..n).collect();
        incomeverify::rng::Rng::new(42).shuffle(&mut order);
        let train_pairs: Vec<_> = order[..split].iter().map(|&i| pairs[i].clone()).collect();
        let test_pairs: Vec<_> = order[split..].iter().map(|&i| pairs[i].clone()).collect();
        let tree = train_matcher(&train_pairs, config.matcher).unwrap();
        let (p, r, f1) = classification_f1(&tree, &test_pairs);
        println!("matcher held-out: P {:.4} R {:.4} F1 {:.4} (n {})", p, r, f1, test_pairs.len());
        println!("matcher tree depth {}", ctx.matcher.depth());
    }

    let all: Vec<_> = out.train.iter().chain(out.test.iter()).cloned().collect();
    let t1 = Instant::now();
    let cache = build_feature_cache(&all, &ctx, 1).unwrap();
    println!("[{:?}] feature cache built in {:?}", t0.elapsed(), t1.elapsed());

    // slot fill diagnostics
    let mut filled = [0usize; 6];
    for v in cache.vectors.values().flatten() {
        let s = v.as_slice();
        let mut k = 0;
        for slot in 0..5 {
            if s[slot * 7 + 6] > 0.0 { k += 1; }
        }
        filled[k] += 1;
    }
    println!("slot fill histogram (0..5): {:?}", filled);

    let inputs = EvalInputs {
        train: &out.train, test: &out.test, ctx: &ctx, cache: &cache,
        external_text: &out.external_text, config: &config,
    };

    for spec in [ModelSpec::MeanWvNn, ModelSpec::BowGbt, ModelSpec::ExternalGbt, ModelSpec::Combined] {
        let t = Instant::now();
        let (rows, ver) = evaluate(&inputs, &[spec], false).unwrap();
        println!("[{:?}] {}: test MAE {:.1} MRE {:.3} | P {:.3} R {:.3} F1 {:.3} (train {:?})",
            t0.elapsed(), rows[0].model, rows[0].test_mae, rows[0].test_mre,
            ver[0].precision, ver[0].recall, ver[0].f1, t.elapsed());
    }

    // global-mean baseline for reference
    {
        let mean: f64 = out.train.iter().map(|e| e.true_income.as_dollars_f64()).sum::<f64>() / out.train.len() as f64;
        let preds: Vec<Money> = out.test.iter().map(|_| Money::from_dollars_f64(mean)).collect();
        let actuals: Vec<Money> = out.test.iter().map(|e| e.true_income).collect();
        let (mae, mre) = mae_mre_dollars(&preds, &actuals).unwrap();
        println!("predict-global-mean baseline: test MAE {:.1} MRE {:.3}", mae, mre);
    }

    let t2 = Instant::now();
    let rows = ablate(&inputs, Study::SourcesCount, false).unwrap();
    println!("[{:?}] sources_count ablation ({:?}):", t0.elapsed(), t2.elapsed());
    for r in &rows { println!("  {}: test MAE {:.1} MRE {:.3}", r.label, r.test_mae, r.test_mre); }

    let rows = ablate(&inputs, Study::SalaryFeatures, false).unwrap();
    println!("salary_features ablation:");
    for r in &rows { println!("  {}: test MAE {:.1}", r.label, r.test_mae); }

    let rows = ablate(&inputs, Study::InputFeatures, false).unwrap();
    println!("input_features ablation:");
    for r in &rows { println!("  {}: test MAE {:.1}", r.label, r.test_mae); }

    // redaction / match-score-only invariant probe
    let mut violations = 0;
    for ex in out.test.iter().take(30) {
        let base = external_vector(&ex.identity, &ctx).unwrap();
        let mut mutated = ex.identity.clone();
        mutated.name.first = "Zz".to_string();
        mutated.name.last = "Qq".to_string();
        mutated.name.middle = None;
        let after = external_vector(&mutated, &ctx).unwrap();
        for i in 0..35 {
            if i % 7 == 6 { continue; } // match-score coordinate
            if (base.as_slice()[i] - after.as_slice()[i]).abs() > 1e-12 {
                violations += 1;
                println!("  VIOLATION {} coord {}: {} -> {}", ex.id, i, base.as_slice()[i], after.as_slice()[i]);
                break;
            }
        }
    }
    println!("name-mutation ratio-coordinate violations: {violations}/30");
    println!("total time {:?}", t0.elapsed());
}
