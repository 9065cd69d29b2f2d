//! H-1B disclosure CSV ingestion.
//!
//! Disclosure files from different years use different column names, so the
//! mapping from our fields to CSV columns is external configuration (a JSON
//! document). Hourly wages are annualized at 2080 hours/year; wage ranges use
//! the lower bound. Rows without a parsable wage are skipped and counted, not
//! errors.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::{is_recognized_state, Address, Identity, PersonName};
use crate::error::{Error, Result};
use crate::extract::{parse_money_range, parse_money_text};
use crate::money::Money;
use crate::rng::Rng;

use super::LabeledExample;

/// Column mapping for one disclosure-file vintage.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ColumnMap {
    pub employer_col: String,
    pub title_col: String,
    pub city_col: String,
    pub state_col: String,
    pub wage_col: String,
    pub wage_unit_col: String,
}

impl ColumnMap {
    pub fn load_json(path: &Path) -> Result<ColumnMap> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let map: ColumnMap = serde_json::from_str(&body)?;
        map.validate_distinct()?;
        Ok(map)
    }

    fn names(&self) -> [&str; 6] {
        [
            &self.employer_col,
            &self.title_col,
            &self.city_col,
            &self.state_col,
            &self.wage_col,
            &self.wage_unit_col,
        ]
    }

    pub fn validate_distinct(&self) -> Result<()> {
        let mut names = self.names();
        names.sort_unstable();
        for pair in names.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::Config(format!(
                    "column map names must be distinct; {:?} repeats",
                    pair[0]
                )));
            }
        }
        Ok(())
    }
}

/// Annualization factors by wage unit.
fn annual_factor(unit: &str) -> Option<f64> {
    match unit.trim().to_ascii_lowercase().as_str() {
        "year" | "yearly" | "annual" => Some(1.0),
        "hour" | "hourly" => Some(2080.0),
        "week" | "weekly" => Some(52.0),
        "bi-weekly" | "biweekly" | "bi weekly" => Some(26.0),
        "month" | "monthly" => Some(12.0),
        _ => None,
    }
}

#[derive(Debug)]
pub struct IngestReport {
    pub examples: Vec<LabeledExample>,
    pub skipped: usize,
    pub total_rows: usize,
}

/// Ingest a disclosure CSV into labeled examples. Disclosure rows have no
/// stated income, so `stated_income` is left absent.
pub fn ingest_hib(csv_path: &Path, columns: &ColumnMap) -> Result<IngestReport> {
    columns.validate_distinct()?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(csv_path)
        .map_err(|e| Error::csv(csv_path, e))?;
    let headers = reader.headers().map_err(|e| Error::csv(csv_path, e))?.clone();
    let position = |name: &str| headers.iter().position(|h| h == name);
    let missing: Vec<&str> = columns
        .names()
        .into_iter()
        .filter(|n| position(n).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Config(format!(
            "header of {csv_path:?} is missing mapped columns: {missing:?}"
        )));
    }
    let employer_idx = position(&columns.employer_col).unwrap();
    let title_idx = position(&columns.title_col).unwrap();
    let city_idx = position(&columns.city_col).unwrap();
    let state_idx = position(&columns.state_col).unwrap();
    let wage_idx = position(&columns.wage_col).unwrap();
    let unit_idx = position(&columns.wage_unit_col).unwrap();

    let mut examples = Vec::new();
    let mut skipped = 0usize;
    let mut total_rows = 0usize;
    for (row_no, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::csv(csv_path, e))?;
        total_rows += 1;
        let cell = |i: usize| row.get(i).unwrap_or("").trim();

        let wage_text = cell(wage_idx);
        // Ranged wages ("60000 - 70000") use the lower bound.
        let wage = parse_money_range(wage_text)
            .map(|(low, _)| low)
            .or_else(|| parse_money_text(wage_text));
        let factor = annual_factor(cell(unit_idx));
        let employer = cell(employer_idx);
        let title = cell(title_idx);
        let (wage, factor) = match (wage, factor) {
            (Some(w), Some(f)) if !w.is_zero() && !employer.is_empty() && !title.is_empty() => {
                (w, f)
            }
            _ => {
                skipped += 1;
                continue;
            }
        };
        let annual = Money::from_cents((wage.cents() as f64 * factor).round() as u64);

        let state = cell(state_idx);
        let address = Address {
            city: (!cell(city_idx).is_empty()).then(|| cell(city_idx).to_string()),
            state: is_recognized_state(state).then(|| state.to_string()),
            ..Address::default()
        };
        let identity = Identity::new(
            PersonName::default(), // disclosure data carries no personal names
            address,
            None,
            employer,
            title,
            None,
        )?;
        examples.push(LabeledExample {
            id: format!("hib-{:06}", row_no + 1),
            identity,
            true_income: annual,
        });
    }
    Ok(IngestReport {
        examples,
        skipped,
        total_rows,
    })
}

/// Deterministic uniform subsample without replacement, preserving row order.
pub fn sample_examples(
    examples: Vec<LabeledExample>,
    sample_n: usize,
    sample_seed: u64,
) -> Vec<LabeledExample> {
    if sample_n >= examples.len() {
        return examples;
    }
    let mut indices: Vec<usize> = (0..examples.len()).collect();
    Rng::new(sample_seed).shuffle(&mut indices);
    indices.truncate(sample_n);
    indices.sort_unstable();
    let mut keep = indices.into_iter().peekable();
    examples
        .into_iter()
        .enumerate()
        .filter_map(|(i, ex)| {
            if keep.peek() == Some(&i) {
                keep.next();
                Some(ex)
            } else {
                None
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map() -> ColumnMap {
        ColumnMap {
            employer_col: "EMPLOYER_NAME".into(),
            title_col: "JOB_TITLE".into(),
            city_col: "WORKSITE_CITY".into(),
            state_col: "WORKSITE_STATE".into(),
            wage_col: "PREVAILING_WAGE".into(),
            wage_unit_col: "PW_UNIT_OF_PAY".into(),
        }
    }

    fn write_csv(rows: &[&str]) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hib.csv");
        let mut body = String::from(
            "EMPLOYER_NAME,JOB_TITLE,WORKSITE_CITY,WORKSITE_STATE,PREVAILING_WAGE,PW_UNIT_OF_PAY\n",
        );
        for row in rows {
            body.push_str(row);
            body.push('\n');
        }
        std::fs::write(&path, body).unwrap();
        (dir, path)
    }

    #[test]
    fn hourly_wage_annualizes_at_2080_hours() {
        let (_dir, path) = write_csv(&["Acme,Engineer,Austin,TX,45.00,Hour"]);
        let report = ingest_hib(&path, &map()).unwrap();
        assert_eq!(report.examples.len(), 1);
        assert_eq!(report.examples[0].true_income, Money::from_dollars(93_600));
        assert_eq!(report.skipped, 0);
    }

    #[test]
    fn yearly_wage_passes_through() {
        let (_dir, path) = write_csv(&["Acme,Engineer,Austin,TX,\"91,000\",Year"]);
        let report = ingest_hib(&path, &map()).unwrap();
        assert_eq!(report.examples[0].true_income, Money::from_dollars(91_000));
    }

    #[test]
    fn empty_wage_is_skipped_and_counted() {
        let (_dir, path) = write_csv(&[
            "Acme,Engineer,Austin,TX,,Year",
            "Acme,Engineer,Austin,TX,80000,Year",
        ]);
        let report = ingest_hib(&path, &map()).unwrap();
        assert_eq!(report.examples.len(), 1);
        assert_eq!(report.skipped, 1);
        assert_eq!(report.total_rows, 2);
        assert_eq!(report.examples.len() + report.skipped, report.total_rows);
    }

    #[test]
    fn wage_range_uses_lower_bound() {
        let (_dir, path) = write_csv(&["Acme,Engineer,Austin,TX,\"60,000 - 70,000\",Year"]);
        let report = ingest_hib(&path, &map()).unwrap();
        assert_eq!(report.examples[0].true_income, Money::from_dollars(60_000));
    }

    #[test]
    fn unknown_unit_is_skipped() {
        let (_dir, path) = write_csv(&["Acme,Engineer,Austin,TX,80000,Fortnight"]);
        let report = ingest_hib(&path, &map()).unwrap();
        assert_eq!(report.examples.len(), 0);
        assert_eq!(report.skipped, 1);
    }

    #[test]
    fn missing_column_is_a_config_error_listing_names() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "EMPLOYER_NAME,JOB_TITLE\nAcme,Engineer\n").unwrap();
        let err = ingest_hib(&path, &map()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("PREVAILING_WAGE"), "{msg}");
        assert!(msg.contains("WORKSITE_CITY"), "{msg}");
    }

    #[test]
    fn duplicate_mapped_columns_rejected() {
        let mut m = map();
        m.title_col = m.employer_col.clone();
        assert!(m.validate_distinct().is_err());
    }

    #[test]
    fn unreadable_file_is_io_error() {
        assert!(ingest_hib(Path::new("/no/such/file.csv"), &map()).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_order_preserving() {
        let (_dir, path) = write_csv(&[
            "A,Engineer,Austin,TX,50000,Year",
            "B,Engineer,Austin,TX,60000,Year",
            "C,Engineer,Austin,TX,70000,Year",
            "D,Engineer,Austin,TX,80000,Year",
            "E,Engineer,Austin,TX,90000,Year",
        ]);
        let all = ingest_hib(&path, &map()).unwrap().examples;
        let s1 = sample_examples(all.clone(), 3, 99);
        let s2 = sample_examples(all.clone(), 3, 99);
        assert_eq!(s1, s2);
        assert_eq!(s1.len(), 3);
        // order preserved: ids ascending
        let ids: Vec<&str> = s1.iter().map(|e| e.id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        assert_eq!(ids, sorted);
        assert_eq!(sample_examples(all.clone(), 10, 1), all);
    }
}
