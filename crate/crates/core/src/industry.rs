//! Employer-to-industry lookup.
//!
//! The industry label widens generic salary queries ("Travel Software
//! Engineer Salary") and groups records for the industry-wide salary-ratio
//! table. Lookup is exact on the canonicalized employer string; there is no
//! fuzzy matching, so unknown employers simply have no industry.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::canon::key_normalize;
use crate::error::{Error, Result};

/// Fixed industry vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash)]
pub enum Industry {
    Technology,
    Manufacturing,
    Finance,
    Healthcare,
    Government,
    Retail,
    Travel,
    Energy,
    Education,
    Logistics,
    Media,
    Construction,
}

impl Industry {
    pub const ALL: [Industry; 12] = [
        Industry::Technology,
        Industry::Manufacturing,
        Industry::Finance,
        Industry::Healthcare,
        Industry::Government,
        Industry::Retail,
        Industry::Travel,
        Industry::Energy,
        Industry::Education,
        Industry::Logistics,
        Industry::Media,
        Industry::Construction,
    ];

    pub fn parse(s: &str) -> Option<Industry> {
        Industry::ALL
            .iter()
            .copied()
            .find(|i| i.as_str().eq_ignore_ascii_case(s.trim()))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Industry::Technology => "Technology",
            Industry::Manufacturing => "Manufacturing",
            Industry::Finance => "Finance",
            Industry::Healthcare => "Healthcare",
            Industry::Government => "Government",
            Industry::Retail => "Retail",
            Industry::Travel => "Travel",
            Industry::Energy => "Energy",
            Industry::Education => "Education",
            Industry::Logistics => "Logistics",
            Industry::Media => "Media",
            Industry::Construction => "Construction",
        }
    }
}

impl fmt::Display for Industry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Canonical employer -> industry map, keyed on the normalized employer form.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct IndustryTable {
    entries: BTreeMap<String, Industry>,
}

impl IndustryTable {
    pub fn new() -> Self {
        IndustryTable::default()
    }

    pub fn insert(&mut self, employer: &str, industry: Industry) {
        self.entries.insert(key_normalize(employer), industry);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact lookup on the canonicalized employer string.
    pub fn infer(&self, employer: &str) -> Option<Industry> {
        self.entries.get(&key_normalize(employer)).copied()
    }

    /// Load from CSV with header `employer,industry`.
    pub fn load_csv(path: &Path) -> Result<IndustryTable> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)
            .map_err(|e| Error::csv(path, e))?;
        let mut table = IndustryTable::new();
        for row in reader.records() {
            let row = row.map_err(|e| Error::csv(path, e))?;
            let (employer, label) = match (row.get(0), row.get(1)) {
                (Some(e), Some(l)) => (e, l),
                _ => {
                    return Err(Error::Config(format!(
                        "industry table row needs employer,industry: {row:?}"
                    )))
                }
            };
            let industry = Industry::parse(label).ok_or_else(|| {
                Error::Config(format!("unknown industry label {label:?} in {path:?}"))
            })?;
            table.insert(employer, industry);
        }
        Ok(table)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        writer
            .write_record(["employer", "industry"])
            .map_err(|e| Error::csv(path, e))?;
        for (employer, industry) in &self.entries {
            writer
                .write_record([employer.as_str(), industry.as_str()])
                .map_err(|e| Error::csv(path, e))?;
        }
        writer.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defaults;

    #[test]
    fn shipped_table_maps_general_electric() {
        let table = defaults::industry_table();
        assert_eq!(table.infer("General Electric"), Some(Industry::Manufacturing));
        // lookup is on the normalized key, so punctuation variants hit too
        assert_eq!(table.infer("general electric"), Some(Industry::Manufacturing));
    }

    #[test]
    fn unknown_employer_is_none() {
        let table = defaults::industry_table();
        assert_eq!(table.infer("Totally Unknown Holdings"), None);
    }

    #[test]
    fn empty_table_is_none_for_everything() {
        let table = IndustryTable::new();
        for employer in ["General Electric", "Acme", ""] {
            assert_eq!(table.infer(employer), None);
        }
    }

    #[test]
    fn labels_round_trip() {
        for industry in Industry::ALL {
            assert_eq!(Industry::parse(industry.as_str()), Some(industry));
        }
        assert_eq!(Industry::parse("not-an-industry"), None);
    }
}
