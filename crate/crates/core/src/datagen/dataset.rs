//! CSV persistence for datasets, match labels, and the external text corpus.
//!
//! Dataset files carry the application-row columns plus the id and the
//! verified income. Money columns hold decimal dollars (`77571.76`); empty
//! cells mean absent.

use std::path::Path;

use chrono::NaiveDate;

use crate::domain::{Address, Identity, PersonName};
use crate::error::{Error, Result};
use crate::extract::parse_money_text;
use crate::money::Money;

use super::{ExternalTextRow, LabeledExample, MatchLabel};

pub const DATASET_HEADER: [&str; 15] = [
    "id",
    "first_name",
    "middle_name",
    "last_name",
    "street",
    "city",
    "county",
    "state",
    "zip",
    "country",
    "dob",
    "employer",
    "job_title",
    "stated_income",
    "true_income",
];

fn money_cell(m: Money) -> String {
    format!("{}.{:02}", m.cents() / 100, m.cents() % 100)
}

fn opt(s: &Option<String>) -> &str {
    s.as_deref().unwrap_or("")
}

pub fn save_dataset(examples: &[LabeledExample], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(DATASET_HEADER).map_err(|e| Error::csv(path, e))?;
    for ex in examples {
        let identity = &ex.identity;
        w.write_record([
            ex.id.as_str(),
            identity.name.first.as_str(),
            identity.name.middle.as_deref().unwrap_or(""),
            identity.name.last.as_str(),
            opt(&identity.address.street),
            opt(&identity.address.city),
            opt(&identity.address.county),
            opt(&identity.address.state),
            opt(&identity.address.zip),
            opt(&identity.address.country),
            &identity.dob.map(|d| d.to_string()).unwrap_or_default(),
            identity.employer.as_str(),
            identity.job_title.as_str(),
            &identity.stated_income.map(money_cell).unwrap_or_default(),
            &money_cell(ex.true_income),
        ])
        .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn load_dataset(path: &Path) -> Result<Vec<LabeledExample>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let headers = r.headers().map_err(|e| Error::csv(path, e))?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("dataset {path:?} missing column {name:?}")))
    };
    let idx: Vec<usize> = DATASET_HEADER.iter().map(|h| col(h)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (row_no, row) in r.records().enumerate() {
        let row = row.map_err(|e| Error::csv(path, e))?;
        let cell = |i: usize| row.get(idx[i]).unwrap_or("").trim().to_string();
        let optional = |i: usize| {
            let v = cell(i);
            if v.is_empty() {
                None
            } else {
                Some(v)
            }
        };
        let dob = match optional(10) {
            Some(v) => Some(v.parse::<NaiveDate>().map_err(|e| {
                Error::InvalidInput(format!("{path:?} row {}: bad dob: {e}", row_no + 2))
            })?),
            None => None,
        };
        let stated = match optional(13) {
            Some(v) => Some(parse_money_text(&v).ok_or_else(|| {
                Error::InvalidInput(format!("{path:?} row {}: bad stated_income {v:?}", row_no + 2))
            })?),
            None => None,
        };
        let true_income = parse_money_text(&cell(14)).ok_or_else(|| {
            Error::InvalidInput(format!("{path:?} row {}: bad true_income", row_no + 2))
        })?;
        let identity = Identity::new(
            PersonName {
                first: cell(1),
                middle: optional(2),
                last: cell(3),
            },
            Address {
                street: optional(4),
                city: optional(5),
                county: optional(6),
                state: optional(7),
                zip: optional(8),
                country: optional(9),
            },
            dob,
            cell(11),
            cell(12),
            stated,
        )?;
        out.push(LabeledExample {
            id: cell(0),
            identity,
            true_income,
        });
    }
    Ok(out)
}

pub fn save_match_labels(labels: &[MatchLabel], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(["identity_id", "record_id", "label"])
        .map_err(|e| Error::csv(path, e))?;
    for l in labels {
        w.write_record([
            l.identity_id.as_str(),
            l.record_id.as_str(),
            if l.label { "1" } else { "0" },
        ])
        .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn load_match_labels(path: &Path) -> Result<Vec<MatchLabel>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let mut out = Vec::new();
    for row in r.records() {
        let row = row.map_err(|e| Error::csv(path, e))?;
        let (identity_id, record_id, label) = match (row.get(0), row.get(1), row.get(2)) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                return Err(Error::Config(format!(
                    "match label row needs identity_id,record_id,label: {row:?}"
                )))
            }
        };
        let label = match label.trim() {
            "1" | "true" => true,
            "0" | "false" => false,
            other => {
                return Err(Error::InvalidInput(format!("bad match label {other:?}")))
            }
        };
        out.push(MatchLabel {
            identity_id: identity_id.to_string(),
            record_id: record_id.to_string(),
            label,
        });
    }
    Ok(out)
}

pub fn save_external_text(rows: &[ExternalTextRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(["job_title", "employer", "income"])
        .map_err(|e| Error::csv(path, e))?;
    for row in rows {
        w.write_record([
            row.job_title.as_str(),
            row.employer.as_str(),
            &money_cell(row.income),
        ])
        .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn load_external_text(path: &Path) -> Result<Vec<ExternalTextRow>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let mut out = Vec::new();
    for row in r.records() {
        let row = row.map_err(|e| Error::csv(path, e))?;
        let income = parse_money_text(row.get(2).unwrap_or("")).ok_or_else(|| {
            Error::InvalidInput(format!("bad income in external text row {row:?}"))
        })?;
        out.push(ExternalTextRow {
            job_title: row.get(0).unwrap_or("").to_string(),
            employer: row.get(1).unwrap_or("").to_string(),
            income,
        });
    }
    Ok(out)
}
