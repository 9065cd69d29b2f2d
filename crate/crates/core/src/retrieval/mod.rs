//! Salary-record retrieval: templated queries against the local index.
//!
//! Query tiers follow the published template table: a specific
//! employer+title query first, a generic title query for the long tail, and
//! an industry-widened query when the employer's industry is known.

pub mod index;

pub use index::CorpusIndex;

use serde::{Deserialize, Serialize};

use crate::domain::Identity;
use crate::industry::{Industry, IndustryTable};

/// Query specificity tier, ordered most to least specific.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QueryTier {
    EmployerTitle,
    TitleOnly,
    IndustryTitle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub text: String,
    pub tier: QueryTier,
}

/// Retrieval knobs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RetrievalConfig {
    /// Results consumed per query.
    pub per_query_k: usize,
    /// Total candidate cap per identity.
    pub candidate_cap: usize,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        RetrievalConfig {
            per_query_k: 10,
            candidate_cap: 50,
        }
    }
}

/// Exact industry lookup for a canonicalized employer.
pub fn infer_industry(employer: &str, table: &IndustryTable) -> Option<Industry> {
    table.infer(employer)
}

fn squeeze(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Build the tiered query list for an identity (employer/title already
/// canonicalized). The industry tier is omitted when no industry is known.
pub fn build_queries(identity: &Identity, industry: Option<Industry>) -> Vec<Query> {
    let employer = squeeze(&identity.employer);
    let title = squeeze(&identity.job_title);
    let mut queries = vec![
        Query {
            text: format!("{employer} {title} Salary"),
            tier: QueryTier::EmployerTitle,
        },
        Query {
            text: format!("{title} Salary"),
            tier: QueryTier::TitleOnly,
        },
    ];
    if let Some(industry) = industry {
        queries.push(Query {
            text: format!("{industry} {title} Salary"),
            tier: QueryTier::IndustryTitle,
        });
    }
    queries
}

/// One retrieved candidate with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub record_id: String,
    pub tier: QueryTier,
    pub score: f64,
}

/// Run the tiered queries, union results, and dedupe: a record keeps its
/// best (lowest) tier, then its best score there. Output is sorted by
/// (tier, score desc, id) and capped.
pub fn retrieve_candidates(
    identity: &Identity,
    index: &CorpusIndex,
    industry_table: &IndustryTable,
    config: &RetrievalConfig,
) -> Vec<Candidate> {
    let industry = infer_industry(&identity.employer, industry_table);
    let queries = build_queries(identity, industry);
    let mut best: std::collections::BTreeMap<String, (QueryTier, f64)> =
        std::collections::BTreeMap::new();
    for query in &queries {
        for (record_id, score) in index.search(&query.text, config.per_query_k) {
            match best.get(&record_id) {
                Some((tier, old_score))
                    if *tier < query.tier || (*tier == query.tier && *old_score >= score) => {}
                _ => {
                    best.insert(record_id, (query.tier, score));
                }
            }
        }
    }
    let mut candidates: Vec<Candidate> = best
        .into_iter()
        .map(|(record_id, (tier, score))| Candidate {
            record_id,
            tier,
            score,
        })
        .collect();
    candidates.sort_by(|a, b| {
        a.tier
            .cmp(&b.tier)
            .then_with(|| b.score.partial_cmp(&a.score).unwrap_or(std::cmp::Ordering::Equal))
            .then_with(|| a.record_id.cmp(&b.record_id))
    });
    candidates.truncate(config.candidate_cap);
    candidates
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::corpus::{Payload, RawRecord, SourceCorpus, SourceType};
    use crate::domain::{Address, PersonName};
    use crate::industry::IndustryTable;
    use crate::money::Money;

    fn identity(employer: &str, title: &str) -> Identity {
        Identity::new(
            PersonName::new("A", None, "B"),
            Address::default(),
            None,
            employer,
            title,
            Some(Money::from_dollars(100_000)),
        )
        .unwrap()
    }

    #[test]
    fn published_query_templates_are_verbatim() {
        let id = identity("XYZ Company", "Software Engineer");
        let queries = build_queries(&id, Some(Industry::Travel));
        assert_eq!(queries[0].text, "XYZ Company Software Engineer Salary");
        assert_eq!(queries[0].tier, QueryTier::EmployerTitle);
        assert_eq!(queries[1].text, "Software Engineer Salary");
        assert_eq!(queries[1].tier, QueryTier::TitleOnly);
        assert_eq!(queries[2].text, "Travel Software Engineer Salary");
        assert_eq!(queries[2].tier, QueryTier::IndustryTitle);
    }

    #[test]
    fn industry_tier_omitted_without_industry() {
        let id = identity("Zyxcorp", "Software Engineer");
        let queries = build_queries(&id, None);
        assert_eq!(queries.len(), 2);
        assert!(queries.iter().all(|q| q.tier != QueryTier::IndustryTitle));
    }

    #[test]
    fn tier_order_is_stable() {
        let id = identity("Acme", "Chef");
        let queries = build_queries(&id, Some(Industry::Retail));
        let tiers: Vec<QueryTier> = queries.iter().map(|q| q.tier).collect();
        assert_eq!(
            tiers,
            vec![QueryTier::EmployerTitle, QueryTier::TitleOnly, QueryTier::IndustryTitle]
        );
    }

    fn snippet(id: &str, text: &str) -> RawRecord {
        RawRecord {
            id: id.to_string(),
            source_type: SourceType::Snippet,
            payload: Payload::Snippet {
                text: text.to_string(),
                url: "https://x.test".to_string(),
            },
        }
    }

    fn fixture() -> (SourceCorpus, IndustryTable) {
        let corpus = SourceCorpus {
            records: vec![
                snippet("r1", "Acme Software Engineer salary report"),
                snippet("r2", "Software Engineer salary nationwide"),
                snippet("r3", "Manufacturing Software Engineer salary guide"),
                snippet("r4", "Chef salary survey"),
                snippet("r5", "Acme holiday party"),
            ],
        };
        let mut industries = IndustryTable::new();
        industries.insert("Acme", Industry::Manufacturing);
        (corpus, industries)
    }

    #[test]
    fn dedup_keeps_lowest_tier() {
        let (corpus, industries) = fixture();
        let index = CorpusIndex::build(&corpus);
        let id = identity("Acme", "Software Engineer");
        let candidates = retrieve_candidates(&id, &index, &industries, &RetrievalConfig::default());
        // r1 is hit by tier-1 and tier-2 queries; it must appear once, at tier 1
        let r1: Vec<&Candidate> = candidates.iter().filter(|c| c.record_id == "r1").collect();
        assert_eq!(r1.len(), 1);
        assert_eq!(r1[0].tier, QueryTier::EmployerTitle);
    }

    #[test]
    fn all_misses_yield_empty_candidates() {
        // corpus sharing no token with any query, including "salary"
        let corpus = SourceCorpus {
            records: vec![
                snippet("r1", "quarterly earnings call transcript"),
                snippet("r2", "holiday party photos"),
            ],
        };
        let index = CorpusIndex::build(&corpus);
        let id = identity("Unknownco", "Astronaut");
        let candidates =
            retrieve_candidates(&id, &index, &IndustryTable::new(), &RetrievalConfig::default());
        assert!(candidates.is_empty());
    }

    #[test]
    fn candidate_union_matches_hand_enumeration() {
        let (corpus, industries) = fixture();
        let index = CorpusIndex::build(&corpus);
        let id = identity("Acme", "Software Engineer");
        let config = RetrievalConfig::default();
        let got: Vec<String> = retrieve_candidates(&id, &index, &industries, &config)
            .into_iter()
            .map(|c| c.record_id)
            .collect();
        // Brute-force union: run each query against the index separately.
        let mut want: std::collections::BTreeSet<String> = Default::default();
        for q in build_queries(&id, Some(Industry::Manufacturing)) {
            for (rid, _) in index.search(&q.text, config.per_query_k) {
                want.insert(rid);
            }
        }
        let got_set: std::collections::BTreeSet<String> = got.iter().cloned().collect();
        assert_eq!(got_set, want);
        // and the set is exactly the salary-bearing records that share tokens
        assert!(got_set.contains("r1"));
        assert!(got_set.contains("r2"));
        assert!(got_set.contains("r3"));
    }

    #[test]
    fn cap_limits_candidates() {
        let (corpus, industries) = fixture();
        let index = CorpusIndex::build(&corpus);
        let id = identity("Acme", "Software Engineer");
        let config = RetrievalConfig {
            per_query_k: 10,
            candidate_cap: 2,
        };
        let candidates = retrieve_candidates(&id, &index, &industries, &config);
        assert_eq!(candidates.len(), 2);
    }
}
