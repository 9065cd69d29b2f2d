//! Identity-to-record matching.
//!
//! Each (input identity, source record) pair is scored with string-similarity
//! features — normalized edit distance on names with a middle-name penalty,
//! city/street/county similarities with exact zip and country checks, cosine
//! similarity on employer and title strings, and an industry agreement bit —
//! then passed through a trained decision tree whose leaf fraction is the
//! match score. Scores above 0.8 are high-confidence matches.

pub mod strsim;
pub mod tree;

pub use tree::{classification_f1, train_matcher, PairDecisionTree, TreeConfig};

use serde::{Deserialize, Serialize};

use crate::canon::{key_normalize, AliasKind, AliasTable};
use crate::domain::{Identity, PersonName};
use crate::extract::IdentityFragment;
use crate::industry::IndustryTable;
use strsim::{edit_similarity, text_cosine};

/// Number of scalar features the matcher sees.
pub const FEATURE_COUNT: usize = 9;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "name_score",
    "city_sim",
    "street_sim",
    "county_sim",
    "zip_exact",
    "country_exact",
    "employer_cos",
    "title_cos",
    "industry_match",
];

/// Similarity features with a presence mask: `None` means the comparison was
/// not computable because one side lacks the field.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MatchFeatures {
    pub name_score: Option<f64>,
    pub city_sim: Option<f64>,
    pub street_sim: Option<f64>,
    pub county_sim: Option<f64>,
    pub zip_exact: Option<f64>,
    pub country_exact: Option<f64>,
    pub employer_cos: Option<f64>,
    pub title_cos: Option<f64>,
    pub industry_match: Option<f64>,
}

impl MatchFeatures {
    pub fn as_array(&self) -> [Option<f64>; FEATURE_COUNT] {
        [
            self.name_score,
            self.city_sim,
            self.street_sim,
            self.county_sim,
            self.zip_exact,
            self.country_exact,
            self.employer_cos,
            self.title_cos,
            self.industry_match,
        ]
    }

    /// All present similarities lie in [0, 1].
    pub fn in_bounds(&self) -> bool {
        self.as_array()
            .iter()
            .flatten()
            .all(|v| (0.0..=1.0).contains(v))
    }
}

/// Confidence band for a match score. High means score > 0.8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bucket {
    Low,
    Medium,
    High,
}

pub fn bucket_for(score: f64) -> Bucket {
    if score > 0.8 {
        Bucket::High
    } else if score > 0.5 {
        Bucket::Medium
    } else {
        Bucket::Low
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub record_id: String,
    pub score: f64,
    pub bucket: Bucket,
    pub features: MatchFeatures,
}

/// Middle-name agreement factor: full agreement (or nothing to compare) is
/// neutral, an initial matching the other side's full middle name costs a
/// little, a conflicting middle name costs a lot. A middle name present on
/// only one side is treated as no evidence.
fn middle_factor(a: Option<&str>, b: Option<&str>) -> f64 {
    let norm = |s: &str| key_normalize(s);
    match (a, b) {
        (None, None) => 1.0,
        (None, Some(_)) | (Some(_), None) => 1.0,
        (Some(ma), Some(mb)) => {
            let (ma, mb) = (norm(ma), norm(mb));
            if ma.is_empty() || mb.is_empty() {
                return 1.0;
            }
            if ma == mb {
                return 1.0;
            }
            let initial_pair = ma.chars().count() == 1 || mb.chars().count() == 1;
            if initial_pair && ma.chars().next() == mb.chars().next() {
                0.9
            } else {
                0.7
            }
        }
    }
}

/// Name match: normalized edit distance on the key-normalized "first last"
/// strings, scaled by the middle-name factor.
pub fn name_score(a: &PersonName, b: &PersonName) -> f64 {
    let full = |n: &PersonName| key_normalize(&format!("{} {}", n.first, n.last));
    let base = edit_similarity(&full(a), &full(b));
    base * middle_factor(a.middle.as_deref(), b.middle.as_deref())
}

/// Address feature block: similarity scores for city/street/county, exact
/// 0/1 for zip and country. Absent components are masked, not scored.
pub fn address_score(identity: &Identity, fragment: &IdentityFragment) -> AddressFeatures {
    let sim = |a: Option<&String>, b: Option<&String>| -> Option<f64> {
        match (a, b) {
            (Some(a), Some(b)) if !a.trim().is_empty() && !b.trim().is_empty() => {
                Some(edit_similarity(&key_normalize(a), &key_normalize(b)))
            }
            _ => None,
        }
    };
    let exact = |a: Option<&String>, b: Option<&String>| -> Option<f64> {
        match (a, b) {
            (Some(a), Some(b)) if !a.trim().is_empty() && !b.trim().is_empty() => {
                Some(f64::from(key_normalize(a) == key_normalize(b)))
            }
            _ => None,
        }
    };
    let addr = &identity.address;
    AddressFeatures {
        city_sim: sim(addr.city.as_ref(), fragment.city.as_ref()),
        street_sim: sim(addr.street.as_ref(), fragment.street.as_ref()),
        county_sim: sim(addr.county.as_ref(), fragment.county.as_ref()),
        zip_exact: exact(addr.zip.as_ref(), fragment.zip.as_ref()),
        country_exact: exact(addr.country.as_ref(), fragment.country.as_ref()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AddressFeatures {
    pub city_sim: Option<f64>,
    pub street_sim: Option<f64>,
    pub county_sim: Option<f64>,
    pub zip_exact: Option<f64>,
    pub country_exact: Option<f64>,
}

/// Employment similarity: token-count cosine between the canonicalized
/// employer strings and between the title strings (with trigram backoff for
/// short strings, inside [`text_cosine`]).
pub fn employment_sim(
    employer_a: &str,
    title_a: &str,
    employer_b: Option<&str>,
    title_b: Option<&str>,
) -> (Option<f64>, Option<f64>) {
    let employer_cos = employer_b
        .filter(|s| !s.trim().is_empty())
        .map(|b| text_cosine(employer_a, b));
    let title_cos = title_b
        .filter(|s| !s.trim().is_empty())
        .map(|b| text_cosine(title_a, b));
    (employer_cos, title_cos)
}

/// Assemble the full feature vector for an (identity, record fragment) pair.
/// Both sides' employer/title are canonicalized before comparison.
pub fn compute_features(
    identity: &Identity,
    fragment: &IdentityFragment,
    aliases: &AliasTable,
    industries: &IndustryTable,
) -> MatchFeatures {
    let employer_input = aliases.canonicalize(&identity.employer, AliasKind::Employer);
    let title_input = aliases.canonicalize(&identity.job_title, AliasKind::Title);
    let employer_frag = fragment
        .employer
        .as_deref()
        .map(|e| aliases.canonicalize(e, AliasKind::Employer));
    let title_frag = fragment
        .occupation
        .as_deref()
        .map(|t| aliases.canonicalize(t, AliasKind::Title));

    let name = match &fragment.name {
        Some(raw) if !identity.name.is_empty() => {
            PersonName::parse(raw).map(|parsed| name_score(&identity.name, &parsed))
        }
        _ => None,
    };
    let addr = address_score(identity, fragment);
    let (employer_cos, title_cos) = employment_sim(
        &employer_input,
        &title_input,
        employer_frag.as_deref(),
        title_frag.as_deref(),
    );
    let industry_match = match (
        industries.infer(&employer_input),
        employer_frag.as_deref().and_then(|e| industries.infer(e)),
    ) {
        (Some(a), Some(b)) => Some(f64::from(a == b)),
        _ => None,
    };
    MatchFeatures {
        name_score: name,
        city_sim: addr.city_sim,
        street_sim: addr.street_sim,
        county_sim: addr.county_sim,
        zip_exact: addr.zip_exact,
        country_exact: addr.country_exact,
        employer_cos,
        title_cos,
        industry_match,
    }
}

/// Score a pair through the trained tree and bucket the result.
pub fn score_pair(
    tree: &PairDecisionTree,
    record_id: &str,
    features: MatchFeatures,
) -> MatchResult {
    let score = tree.score(&features);
    MatchResult {
        record_id: record_id.to_string(),
        score,
        bucket: bucket_for(score),
        features,
    }
}
