//! Report CSVs and the reproducibility manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use incomeverify::pipeline::ablate::AblationRow;
use incomeverify::pipeline::eval::{EvalRow, VerificationRow};

fn fmt3(v: f64) -> String {
    format!("{v:.3}")
}

pub fn write_eval_csv(rows: &[EvalRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("writing {}", path.display()))?;
    w.write_record(["Model", "CV MAE", "Test Set MAE", "Test Set MRE"])?;
    for row in rows {
        w.write_record([
            row.model.clone(),
            row.cv_mae.map(fmt3).unwrap_or_default(),
            fmt3(row.test_mae),
            fmt3(row.test_mre),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_verification_csv(rows: &[VerificationRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("writing {}", path.display()))?;
    w.write_record(["Model", "Precision", "Recall", "F1 score"])?;
    for row in rows {
        w.write_record([
            row.model.clone(),
            format!("{:.4}", row.precision),
            format!("{:.4}", row.recall),
            format!("{:.4}", row.f1),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ablation_csv(rows: &[AblationRow], first_column: &str, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("writing {}", path.display()))?;
    w.write_record([first_column, "CV MAE", "Test Set MAE", "Test Set MRE"])?;
    for row in rows {
        w.write_record([
            row.label.clone(),
            row.cv_mae.map(fmt3).unwrap_or_default(),
            fmt3(row.test_mae),
            fmt3(row.test_mre),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes =
        std::fs::read(path).with_context(|| format!("hashing {}", path.display()))?;
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(64);
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    Ok(hex)
}

/// Reproducibility record: the resolved configuration, every input file's
/// hash, and the outputs written. Contains no timestamps, so identical runs
/// produce identical manifests.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config: serde_json::Value,
    pub inputs: BTreeMap<String, FileStamp>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct FileStamp {
    pub path: String,
    pub sha256: String,
}

pub fn write_manifest<C: Serialize>(
    command: &str,
    config: &C,
    inputs: &BTreeMap<String, PathBuf>,
    outputs: &[PathBuf],
    out_path: &Path,
) -> Result<()> {
    let mut stamped = BTreeMap::new();
    for (name, path) in inputs {
        stamped.insert(
            name.clone(),
            FileStamp {
                path: path.display().to_string(),
                sha256: sha256_file(path)?,
            },
        );
    }
    let manifest = Manifest {
        command: command.to_string(),
        config: serde_json::to_value(config)?,
        inputs: stamped,
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
    };
    let body = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(out_path, body)
        .with_context(|| format!("writing manifest {}", out_path.display()))?;
    Ok(())
}
