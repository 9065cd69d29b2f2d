//! Run configuration: file paths plus pipeline hyperparameters, loaded from
//! JSON with CLI flag overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use incomeverify::canon::AliasTable;
use incomeverify::datagen::corpus::{load_corpus, SourceCorpus};
use incomeverify::datagen::dataset::{load_dataset, load_external_text, load_match_labels};
use incomeverify::datagen::{ExternalTextRow, LabeledExample, MatchLabel};
use incomeverify::defaults;
use incomeverify::extract::{PathSpecs, PatternSet};
use incomeverify::industry::IndustryTable;
use incomeverify::pipeline::PipelineConfig;

/// Input file locations. Table paths are optional: absent entries fall back
/// to the built-in defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RunPaths {
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub match_labels: Option<PathBuf>,
    pub external_text: Option<PathBuf>,
    pub alias_table: Option<PathBuf>,
    pub industry_table: Option<PathBuf>,
    pub pattern_file: Option<PathBuf>,
    pub path_specs: Option<PathBuf>,
    pub index: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub paths: RunPaths,
    pub pipeline: PipelineConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let body = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: RunConfig = serde_json::from_str(&body)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(config)
    }

    /// Resolve a path relative to the config file's directory.
    pub fn resolve(&self, base: &Path, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    }
}

/// Everything loaded and parsed for a run.
pub struct LoadedData {
    pub train: Vec<LabeledExample>,
    pub test: Vec<LabeledExample>,
    pub corpus: SourceCorpus,
    pub match_labels: Vec<MatchLabel>,
    pub external_text: Vec<ExternalTextRow>,
    pub aliases: AliasTable,
    pub industries: IndustryTable,
    pub patterns: PatternSet,
    pub specs: PathSpecs,
    /// inputs actually read, for the manifest
    pub input_files: BTreeMap<String, PathBuf>,
}

pub fn load_data(config: &RunConfig, base: &Path) -> Result<LoadedData> {
    let mut input_files = BTreeMap::new();
    let mut track = |name: &str, p: &PathBuf| {
        input_files.insert(name.to_string(), p.clone());
    };

    let need = |slot: &Option<PathBuf>, name: &str| -> Result<PathBuf> {
        match slot {
            Some(p) => Ok(config.resolve(base, p)),
            None => bail!("config is missing required path {name:?}"),
        }
    };

    let train_path = need(&config.paths.train, "train")?;
    track("train", &train_path);
    let train = load_dataset(&train_path)?;

    let test = match &config.paths.test {
        Some(p) => {
            let p = config.resolve(base, p);
            track("test", &p);
            load_dataset(&p)?
        }
        None => Vec::new(),
    };

    let corpus_path = need(&config.paths.corpus, "corpus")?;
    track("corpus", &corpus_path);
    let report = load_corpus(&corpus_path)?;
    if !report.errors.is_empty() {
        eprintln!(
            "warning: {} malformed corpus lines skipped (first: {} line {}: {})",
            report.errors.len(),
            report.errors[0].file.display(),
            report.errors[0].line,
            report.errors[0].reason
        );
    }

    let match_labels = match &config.paths.match_labels {
        Some(p) => {
            let p = config.resolve(base, p);
            track("match_labels", &p);
            load_match_labels(&p)?
        }
        None => Vec::new(),
    };

    let external_text = match &config.paths.external_text {
        Some(p) => {
            let p = config.resolve(base, p);
            track("external_text", &p);
            load_external_text(&p)?
        }
        None => Vec::new(),
    };

    let aliases = match &config.paths.alias_table {
        Some(p) => {
            let p = config.resolve(base, p);
            track("alias_table", &p);
            AliasTable::load_csv(&p)?
        }
        None => defaults::alias_table(),
    };
    let industries = match &config.paths.industry_table {
        Some(p) => {
            let p = config.resolve(base, p);
            track("industry_table", &p);
            IndustryTable::load_csv(&p)?
        }
        None => defaults::industry_table(),
    };
    let patterns = match &config.paths.pattern_file {
        Some(p) => {
            let p = config.resolve(base, p);
            track("pattern_file", &p);
            PatternSet::load_json(&p)?
        }
        None => defaults::pattern_set(),
    };
    let specs = match &config.paths.path_specs {
        Some(p) => {
            let p = config.resolve(base, p);
            track("path_specs", &p);
            PathSpecs::load_json(&p)?
        }
        None => defaults::path_specs(),
    };

    Ok(LoadedData {
        train,
        test,
        corpus: report.corpus,
        match_labels,
        external_text,
        aliases,
        industries,
        patterns,
        specs,
        input_files,
    })
}
