//! Path-based wrapper extraction for tree-structured site documents.
//!
//! Each site gets a spec mapping attribute names to slash-separated paths
//! into its document (`compensation/base/median`). Paths address object keys
//! and array indices only, so every path resolves to at most one node.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::datagen::corpus::SourceType;
use crate::error::{Error, Result};
use crate::extract::moneytext::parse_money_text;
use crate::extract::{IdentityFragment, SalaryAttr, SalaryAttributes, SourceRecord, TrustWeights};
use crate::money::Money;

/// Per-site attribute paths: `{site_id: {attribute_name: "a/b/0/c"}}`.
///
/// Attribute names are the six salary attributes plus the identity fields
/// `name`, `employer`, `occupation`, `city`, `state`, `zip`, `country`,
/// `year`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathSpecs {
    pub sites: BTreeMap<String, BTreeMap<String, String>>,
}

impl PathSpecs {
    pub fn load_json(path: &Path) -> Result<PathSpecs> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&body)?)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_string_pretty(self)?;
        std::fs::write(path, body).map_err(|e| Error::io(path, e))
    }
}

/// Resolve a slash-separated path against a JSON tree.
fn resolve<'a>(doc: &'a Value, path: &str) -> Option<&'a Value> {
    let mut node = doc;
    for step in path.split('/') {
        if step.is_empty() {
            continue;
        }
        node = match node {
            Value::Object(map) => map.get(step)?,
            Value::Array(items) => items.get(step.parse::<usize>().ok()?)?,
            _ => return None,
        };
    }
    Some(node)
}

/// Read a money value from a resolved node: numbers are whole dollars,
/// strings go through the money parser.
fn node_money(node: &Value) -> Option<Money> {
    match node {
        Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                Some(Money::from_dollars(i))
            } else {
                n.as_f64().map(Money::from_dollars_f64)
            }
        }
        Value::String(s) => parse_money_text(s),
        _ => None,
    }
}

fn node_string(node: &Value) -> Option<String> {
    match node {
        Value::String(s) if !s.trim().is_empty() => Some(s.trim().to_string()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

/// Extract one salary-site document using the spec registered for `site`.
///
/// Missing paths leave attributes absent (imputation handles them later);
/// a missing spec or an extraction that violates attribute ordering is an
/// error carrying the site id.
pub fn extract_wrapper(
    record_id: &str,
    site: &str,
    doc: &Value,
    specs: &PathSpecs,
    trust: &TrustWeights,
) -> Result<SourceRecord> {
    let spec = specs.sites.get(site).ok_or_else(|| Error::Extraction {
        record_id: record_id.to_string(),
        reason: format!("no path spec for site {site:?}"),
    })?;
    if !doc.is_object() && !doc.is_array() {
        return Err(Error::Extraction {
            record_id: record_id.to_string(),
            reason: format!("site {site:?} document is not a tree"),
        });
    }

    let mut attributes = SalaryAttributes::default();
    let mut fragment = IdentityFragment::default();
    for (attr_name, path) in spec {
        let Some(node) = resolve(doc, path) else {
            continue; // attribute absent in this document
        };
        if let Some(attr) = SalaryAttr::ALL.iter().find(|a| a.name() == attr_name) {
            if let Some(amount) = node_money(node) {
                attributes.set(*attr, amount);
            }
            continue;
        }
        match attr_name.as_str() {
            "name" => fragment.name = node_string(node),
            "employer" => fragment.employer = node_string(node),
            "occupation" => fragment.occupation = node_string(node),
            "street" => fragment.street = node_string(node),
            "city" => fragment.city = node_string(node),
            "county" => fragment.county = node_string(node),
            "state" => fragment.state = node_string(node),
            "zip" => fragment.zip = node_string(node),
            "country" => fragment.country = node_string(node),
            "year" => fragment.year = node.as_i64().map(|y| y as i32),
            other => {
                return Err(Error::Extraction {
                    record_id: record_id.to_string(),
                    reason: format!("site {site:?} spec names unknown attribute {other:?}"),
                })
            }
        }
    }

    let (attributes, discard_reason) = match attributes.validated() {
        Ok(attributes) if attributes.is_all_absent() => {
            (attributes, Some("no salary attribute found".to_string()))
        }
        Ok(attributes) => (attributes, None),
        Err(reason) => (SalaryAttributes::default(), Some(reason)),
    };
    Ok(SourceRecord {
        id: record_id.to_string(),
        source_type: SourceType::SalarySite,
        fragment,
        attributes,
        trust_weight: trust.weight(SourceType::SalarySite),
        discard_reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defaults;
    use serde_json::json;

    /// A site document shaped like the published aggregation-site example:
    /// mean/min/max columns for base salary and total compensation. The
    /// site's central ("mean") value maps into the median attribute slot.
    fn sample_doc() -> Value {
        json!({
            "position": {
                "title": "Software Engineer",
                "employer": "Randomcorp",
                "location": {"city": "San Francisco", "state": "CA"}
            },
            "compensation": {
                "base_salary": {"mean": 150000, "min": 90000, "max": 234000},
                "total_compensation": {"mean": 265000, "min": 90000, "max": 1000000},
                "cash_bonus": {"mean": 38000, "min": 10000, "max": 500000},
                "stocks": {"mean": 100000, "min": 10000, "max": 800000}
            },
            "sample_size": 42
        })
    }

    #[test]
    fn extracts_published_site_shape() {
        let specs = defaults::path_specs();
        let rec = extract_wrapper(
            "site-1",
            "paylevels",
            &sample_doc(),
            &specs,
            &TrustWeights::default(),
        )
        .unwrap();
        assert_eq!(rec.attributes.base_low, Some(Money::from_dollars(90_000)));
        assert_eq!(rec.attributes.base_median, Some(Money::from_dollars(150_000)));
        assert_eq!(rec.attributes.base_high, Some(Money::from_dollars(234_000)));
        assert_eq!(rec.attributes.total_low, Some(Money::from_dollars(90_000)));
        assert_eq!(rec.attributes.total_median, Some(Money::from_dollars(265_000)));
        assert_eq!(rec.attributes.total_high, Some(Money::from_dollars(1_000_000)));
        assert_eq!(rec.fragment.employer.as_deref(), Some("Randomcorp"));
        assert_eq!(rec.fragment.occupation.as_deref(), Some("Software Engineer"));
        assert_eq!(rec.fragment.city.as_deref(), Some("San Francisco"));
        assert!(!rec.is_discardable());
    }

    #[test]
    fn missing_path_leaves_attribute_absent() {
        let specs = defaults::path_specs();
        let mut doc = sample_doc();
        doc["compensation"]["base_salary"]
            .as_object_mut()
            .unwrap()
            .remove("min");
        let rec = extract_wrapper(
            "site-2",
            "paylevels",
            &doc,
            &specs,
            &TrustWeights::default(),
        )
        .unwrap();
        assert_eq!(rec.attributes.base_low, None);
        assert_eq!(rec.attributes.base_median, Some(Money::from_dollars(150_000)));
        assert!(!rec.is_discardable());
    }

    #[test]
    fn empty_document_is_discardable() {
        let specs = defaults::path_specs();
        let rec = extract_wrapper(
            "site-3",
            "paylevels",
            &json!({}),
            &specs,
            &TrustWeights::default(),
        )
        .unwrap();
        assert!(rec.is_discardable());
        assert!(rec.attributes.is_all_absent());
    }

    #[test]
    fn unknown_site_is_an_error_with_site_id() {
        let specs = defaults::path_specs();
        let err = extract_wrapper(
            "site-4",
            "no-such-site",
            &sample_doc(),
            &specs,
            &TrustWeights::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("no-such-site"));
    }

    #[test]
    fn non_tree_document_is_an_error() {
        let specs = defaults::path_specs();
        let err = extract_wrapper(
            "site-5",
            "paylevels",
            &json!("just a string"),
            &specs,
            &TrustWeights::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("site-5"));
    }

    #[test]
    fn array_indices_resolve() {
        let doc = json!({"rows": [{"pay": "50,000"}, {"pay": "60,000"}]});
        assert_eq!(
            node_money(resolve(&doc, "rows/1/pay").unwrap()),
            Some(Money::from_dollars(60_000))
        );
        assert!(resolve(&doc, "rows/5/pay").is_none());
    }
}
