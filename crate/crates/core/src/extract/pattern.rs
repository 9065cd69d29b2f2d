//! Pattern-based extraction from free-text snippets.
//!
//! A pattern set is an ordered list of regular expressions with named capture
//! groups mapped onto record attributes. Patterns are data, not code: the
//! shipped list lives in the defaults module and can be overridden with a
//! JSON file, so corpora and patterns evolve independently. For each
//! attribute, the first pattern (in list order) that captures it wins.

use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::datagen::corpus::SourceType;
use crate::error::{Error, Result};
use crate::extract::moneytext::parse_money_text;
use crate::extract::{IdentityFragment, SalaryAttr, SalaryAttributes, SourceRecord, TrustWeights};

/// One extraction pattern: a regex plus a map from attribute name to capture
/// group name.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternDef {
    pub name: String,
    pub pattern: String,
    /// attribute -> capture group, e.g. {"base_median": "money", "occupation": "title"}
    pub captures: std::collections::BTreeMap<String, String>,
}

/// Compiled, ordered pattern list.
#[derive(Debug, Clone)]
pub struct PatternSet {
    patterns: Vec<(PatternDef, Regex)>,
}

impl PatternSet {
    pub fn compile(defs: Vec<PatternDef>) -> Result<PatternSet> {
        let mut patterns = Vec::with_capacity(defs.len());
        for def in defs {
            let regex = Regex::new(&def.pattern).map_err(|e| {
                Error::Config(format!("pattern {:?} does not compile: {e}", def.name))
            })?;
            patterns.push((def, regex));
        }
        Ok(PatternSet { patterns })
    }

    pub fn load_json(path: &Path) -> Result<PatternSet> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let defs: Vec<PatternDef> = serde_json::from_str(&body)?;
        PatternSet::compile(defs)
    }

    pub fn save_json(defs: &[PatternDef], path: &Path) -> Result<()> {
        let body = serde_json::to_string_pretty(defs)?;
        std::fs::write(path, body).map_err(|e| Error::io(path, e))
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

/// Run the ordered pattern list over a snippet. Returns `None` when no
/// pattern matches at all.
pub fn extract_pattern(
    record_id: &str,
    text: &str,
    patterns: &PatternSet,
    trust: &TrustWeights,
) -> Option<SourceRecord> {
    let mut attributes = SalaryAttributes::default();
    let mut fragment = IdentityFragment::default();
    let mut matched_any = false;

    for (def, regex) in &patterns.patterns {
        let Some(captures) = regex.captures(text) else {
            continue;
        };
        matched_any = true;
        for (attr_name, group) in &def.captures {
            let Some(value) = captures.name(group).map(|m| m.as_str().trim()) else {
                continue;
            };
            if let Some(attr) = SalaryAttr::ALL.iter().find(|a| a.name() == attr_name) {
                // first pattern wins per attribute
                if attributes.get(*attr).is_none() {
                    if let Some(amount) = parse_money_text(value) {
                        attributes.set(*attr, amount);
                    }
                }
                continue;
            }
            match attr_name.as_str() {
                "occupation" => {
                    fragment.occupation.get_or_insert_with(|| value.to_string());
                }
                "employer" => {
                    fragment.employer.get_or_insert_with(|| value.to_string());
                }
                "city" => {
                    fragment.city.get_or_insert_with(|| value.to_string());
                }
                _ => {}
            }
        }
    }

    if !matched_any {
        return None;
    }
    let (attributes, discard_reason) = match attributes.validated() {
        Ok(attributes) if attributes.is_all_absent() => {
            (attributes, Some("patterns matched but no amount parsed".to_string()))
        }
        Ok(attributes) => (attributes, None),
        Err(reason) => (SalaryAttributes::default(), Some(reason)),
    };
    Some(SourceRecord {
        id: record_id.to_string(),
        source_type: SourceType::Snippet,
        fragment,
        attributes,
        trust_weight: trust.weight(SourceType::Snippet),
        discard_reason,
    })
}
