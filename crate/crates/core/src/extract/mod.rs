//! Turning raw corpus payloads into structured [`SourceRecord`]s.
//!
//! Three extractor families, one per payload shape: structured rows
//! (government databases), path-based wrappers over tree documents
//! (salary sites), and ordered text patterns (snippets).

pub mod moneytext;
pub mod pattern;
pub mod wrapper;

pub use moneytext::{parse_money_range, parse_money_text};
pub use pattern::{extract_pattern, PatternSet};
pub use wrapper::{extract_wrapper, PathSpecs};

use serde::{Deserialize, Serialize};

use crate::datagen::corpus::{Payload, RawRecord, SourceType};
use crate::error::{Error, Result};
use crate::money::Money;

/// The six per-source salary attributes, all optional.
///
/// Invariant: within base and within total, low <= median <= high whenever
/// both sides of a comparison are present. Construct through
/// [`SalaryAttributes::validated`] to enforce it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SalaryAttributes {
    pub base_low: Option<Money>,
    pub base_median: Option<Money>,
    pub base_high: Option<Money>,
    pub total_low: Option<Money>,
    pub total_median: Option<Money>,
    pub total_high: Option<Money>,
}

/// Attribute identifiers in the fixed feature-layout order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SalaryAttr {
    BaseLow,
    BaseMedian,
    BaseHigh,
    TotalLow,
    TotalMedian,
    TotalHigh,
}

impl SalaryAttr {
    /// Feature-vector order: base low/median/high then total low/median/high.
    pub const ALL: [SalaryAttr; 6] = [
        SalaryAttr::BaseLow,
        SalaryAttr::BaseMedian,
        SalaryAttr::BaseHigh,
        SalaryAttr::TotalLow,
        SalaryAttr::TotalMedian,
        SalaryAttr::TotalHigh,
    ];

    /// Imputation anchor priority: medians first, then lows, then highs.
    pub const FILL_PRIORITY: [SalaryAttr; 6] = [
        SalaryAttr::BaseMedian,
        SalaryAttr::TotalMedian,
        SalaryAttr::BaseLow,
        SalaryAttr::BaseHigh,
        SalaryAttr::TotalLow,
        SalaryAttr::TotalHigh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SalaryAttr::BaseLow => "base_low",
            SalaryAttr::BaseMedian => "base_median",
            SalaryAttr::BaseHigh => "base_high",
            SalaryAttr::TotalLow => "total_low",
            SalaryAttr::TotalMedian => "total_median",
            SalaryAttr::TotalHigh => "total_high",
        }
    }

    pub fn index(self) -> usize {
        SalaryAttr::ALL.iter().position(|a| *a == self).unwrap()
    }
}

impl SalaryAttributes {
    pub fn get(&self, attr: SalaryAttr) -> Option<Money> {
        match attr {
            SalaryAttr::BaseLow => self.base_low,
            SalaryAttr::BaseMedian => self.base_median,
            SalaryAttr::BaseHigh => self.base_high,
            SalaryAttr::TotalLow => self.total_low,
            SalaryAttr::TotalMedian => self.total_median,
            SalaryAttr::TotalHigh => self.total_high,
        }
    }

    pub fn set(&mut self, attr: SalaryAttr, value: Money) {
        match attr {
            SalaryAttr::BaseLow => self.base_low = Some(value),
            SalaryAttr::BaseMedian => self.base_median = Some(value),
            SalaryAttr::BaseHigh => self.base_high = Some(value),
            SalaryAttr::TotalLow => self.total_low = Some(value),
            SalaryAttr::TotalMedian => self.total_median = Some(value),
            SalaryAttr::TotalHigh => self.total_high = Some(value),
        }
    }

    pub fn is_all_absent(&self) -> bool {
        SalaryAttr::ALL.iter().all(|a| self.get(*a).is_none())
    }

    pub fn present_count(&self) -> usize {
        SalaryAttr::ALL.iter().filter(|a| self.get(**a).is_some()).count()
    }

    fn ordering_violation(&self) -> Option<String> {
        let check = |low: Option<Money>, mid: Option<Money>, high: Option<Money>, tag: &str| {
            if let (Some(l), Some(m)) = (low, mid) {
                if l > m {
                    return Some(format!("{tag} low {l} > median {m}"));
                }
            }
            if let (Some(m), Some(h)) = (mid, high) {
                if m > h {
                    return Some(format!("{tag} median {m} > high {h}"));
                }
            }
            if let (Some(l), Some(h)) = (low, high) {
                if l > h {
                    return Some(format!("{tag} low {l} > high {h}"));
                }
            }
            None
        };
        check(self.base_low, self.base_median, self.base_high, "base")
            .or_else(|| check(self.total_low, self.total_median, self.total_high, "total"))
    }

    /// Enforce the low <= median <= high invariant; the reason string feeds
    /// the discard report for violating extractions.
    pub fn validated(self) -> std::result::Result<Self, String> {
        match self.ordering_violation() {
            None => Ok(self),
            Some(reason) => Err(reason),
        }
    }
}

/// Partial identity carried by a source record. Which fields exist depends
/// entirely on the source; comparisons against absent fields are masked in
/// the matcher rather than scored.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IdentityFragment {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub street: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub city: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub county: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zip: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub country: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub employer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occupation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
}

/// One extracted public income record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceRecord {
    pub id: String,
    pub source_type: SourceType,
    pub fragment: IdentityFragment,
    pub attributes: SalaryAttributes,
    /// Configured prior on the source family's reliability, in (0, 1].
    pub trust_weight: f64,
    /// Set when the record carries no usable salary attribute; discardable
    /// records are kept for reporting but never feed features.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discard_reason: Option<String>,
}

impl SourceRecord {
    pub fn is_discardable(&self) -> bool {
        self.discard_reason.is_some() || self.attributes.is_all_absent()
    }
}

/// Default trust weights by source family; configuration, not ground truth.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrustWeights {
    pub government: f64,
    pub salary_site: f64,
    pub snippet: f64,
}

impl Default for TrustWeights {
    fn default() -> Self {
        TrustWeights {
            government: 1.0,
            salary_site: 0.7,
            snippet: 0.4,
        }
    }
}

impl TrustWeights {
    pub fn weight(&self, source_type: SourceType) -> f64 {
        match source_type {
            SourceType::Government => self.government,
            SourceType::SalarySite => self.salary_site,
            SourceType::Snippet => self.snippet,
        }
    }
}

/// Extract a government database row. Point estimates: salary becomes the
/// base median and salary + bonus the total median; lows and highs are left
/// absent for later ratio imputation.
pub fn extract_structured(
    id: &str,
    name: &str,
    salary: &str,
    bonus: &str,
    agency: &str,
    location: &str,
    occupation: &str,
    year: i32,
    trust: &TrustWeights,
) -> SourceRecord {
    let fragment = IdentityFragment {
        name: non_empty(name),
        city: non_empty(location),
        employer: non_empty(agency),
        occupation: non_empty(occupation),
        year: Some(year),
        ..IdentityFragment::default()
    };
    let base = parse_money_text(salary);
    let record = |attributes: SalaryAttributes, discard_reason: Option<String>| SourceRecord {
        id: id.to_string(),
        source_type: SourceType::Government,
        fragment: fragment.clone(),
        attributes,
        trust_weight: trust.weight(SourceType::Government),
        discard_reason,
    };
    let Some(base) = base else {
        return record(
            SalaryAttributes::default(),
            Some(format!("unparsable salary {salary:?}")),
        );
    };
    let bonus_amount = parse_money_text(bonus).unwrap_or(Money::ZERO);
    let total = match base.checked_add(bonus_amount) {
        Ok(total) => total,
        Err(_) => {
            return record(
                SalaryAttributes::default(),
                Some(format!("salary {salary:?} + bonus {bonus:?} overflows")),
            )
        }
    };
    let attributes = SalaryAttributes {
        base_median: Some(base),
        total_median: Some(total),
        ..SalaryAttributes::default()
    };
    match attributes.validated() {
        Ok(attributes) => record(attributes, None),
        Err(reason) => record(SalaryAttributes::default(), Some(reason)),
    }
}

fn non_empty(s: &str) -> Option<String> {
    let t = s.trim();
    if t.is_empty() {
        None
    } else {
        Some(t.to_string())
    }
}

/// Dispatch a raw corpus record to the extractor for its payload shape.
pub fn extract_record(
    raw: &RawRecord,
    specs: &PathSpecs,
    patterns: &PatternSet,
    trust: &TrustWeights,
) -> Result<SourceRecord> {
    match (&raw.source_type, &raw.payload) {
        (
            SourceType::Government,
            Payload::Government {
                name,
                salary,
                bonus,
                agency,
                location,
                occupation,
                year,
            },
        ) => Ok(extract_structured(
            &raw.id, name, salary, bonus, agency, location, occupation, *year, trust,
        )),
        (SourceType::SalarySite, Payload::SalarySite { site, doc }) => {
            extract_wrapper(&raw.id, site, doc, specs, trust)
        }
        (SourceType::Snippet, Payload::Snippet { text, .. }) => {
            Ok(match extract_pattern(&raw.id, text, patterns, trust) {
                Some(record) => record,
                None => SourceRecord {
                    id: raw.id.clone(),
                    source_type: SourceType::Snippet,
                    fragment: IdentityFragment::default(),
                    attributes: SalaryAttributes::default(),
                    trust_weight: trust.weight(SourceType::Snippet),
                    discard_reason: Some("no pattern matched".to_string()),
                },
            })
        }
        (declared, payload) => Err(Error::Extraction {
            record_id: raw.id.clone(),
            reason: format!("payload shape does not match declared type {declared:?}: {payload:?}"),
        }),
    }
}

/// Extract the whole corpus, keyed by record id. Records whose extraction
/// fails structurally are returned in the error list; discardable records are
/// kept (flagged) so reports can count them.
pub fn extract_corpus(
    corpus: &crate::datagen::corpus::SourceCorpus,
    specs: &PathSpecs,
    patterns: &PatternSet,
    trust: &TrustWeights,
) -> (std::collections::BTreeMap<String, SourceRecord>, Vec<Error>) {
    let mut records = std::collections::BTreeMap::new();
    let mut errors = Vec::new();
    for raw in &corpus.records {
        match extract_record(raw, specs, patterns, trust) {
            Ok(record) => {
                records.insert(record.id.clone(), record);
            }
            Err(e) => errors.push(e),
        }
    }
    (records, errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trust() -> TrustWeights {
        TrustWeights::default()
    }

    #[test]
    fn government_row_with_zero_bonus() {
        // Row 1 of the reference extract: salary $73,482, no bonus.
        let rec = extract_structured(
            "gov-1",
            "James Bond",
            "$73,482",
            "$0",
            "Department of Homeland Security",
            "SELLS",
            "Medical Technologist",
            2016,
            &trust(),
        );
        assert_eq!(rec.attributes.base_median, Some(Money::from_dollars(73_482)));
        assert_eq!(rec.attributes.total_median, Some(Money::from_dollars(73_482)));
        assert_eq!(rec.attributes.base_low, None);
        assert!(!rec.is_discardable());
        assert_eq!(rec.fragment.occupation.as_deref(), Some("Medical Technologist"));
        assert_eq!(rec.trust_weight, 1.0);
    }

    #[test]
    fn government_row_folds_bonus_into_total() {
        let rec = extract_structured(
            "gov-2",
            "Harry Potter",
            "$84,443",
            "$10000",
            "Department of Agriculture",
            "AMES",
            "General Engineering",
            2016,
            &trust(),
        );
        assert_eq!(rec.attributes.base_median, Some(Money::from_dollars(84_443)));
        assert_eq!(rec.attributes.total_median, Some(Money::from_dollars(94_443)));
    }

    #[test]
    fn unparsable_salary_is_discardable_with_reason() {
        let rec = extract_structured(
            "gov-3", "A B", "N/A", "$0", "Agency", "CITY", "Job", 2016, &trust(),
        );
        assert!(rec.is_discardable());
        assert!(rec.discard_reason.as_deref().unwrap().contains("N/A"));
    }

    #[test]
    fn attribute_ordering_is_enforced() {
        let bad = SalaryAttributes {
            base_low: Some(Money::from_dollars(200_000)),
            base_median: Some(Money::from_dollars(100_000)),
            ..SalaryAttributes::default()
        };
        assert!(bad.validated().is_err());

        let good = SalaryAttributes {
            base_low: Some(Money::from_dollars(90_000)),
            base_median: Some(Money::from_dollars(150_000)),
            base_high: Some(Money::from_dollars(234_000)),
            ..SalaryAttributes::default()
        };
        assert!(good.validated().is_ok());
    }

    #[test]
    fn source_record_serde_round_trip() {
        let rec = extract_structured(
            "gov-1",
            "James Bond",
            "$73,482",
            "$0",
            "DHS",
            "SELLS",
            "Medical Technologist",
            2016,
            &trust(),
        );
        let json = serde_json::to_string(&rec).unwrap();
        let back: SourceRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(rec, back);
    }

    #[test]
    fn fill_priority_order_is_medians_first() {
        assert_eq!(SalaryAttr::FILL_PRIORITY[0], SalaryAttr::BaseMedian);
        assert_eq!(SalaryAttr::FILL_PRIORITY[1], SalaryAttr::TotalMedian);
    }
}
