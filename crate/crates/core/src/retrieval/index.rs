//! Inverted index with BM25 ranking over the local record corpus.
//!
//! Stands in for the web search step: queries built from the input identity
//! run against this index instead of a live engine. Scoring uses BM25 with
//! k1 = 1.2, b = 0.75 and a non-negative idf; ties break on ascending record
//! id so rankings are fully deterministic.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::canon::tokenize;
use crate::datagen::corpus::SourceCorpus;
use crate::error::{Error, Result};

pub const BM25_K1: f64 = 1.2;
pub const BM25_B: f64 = 0.75;

const INDEX_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Posting {
    /// dense document index (position in `doc_ids`)
    pub doc: u32,
    /// term frequency in that document
    pub tf: u32,
}

/// Immutable searchable corpus index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusIndex {
    version: u32,
    /// record ids, sorted; the dense doc index points here
    doc_ids: Vec<String>,
    doc_len: Vec<u32>,
    postings: BTreeMap<String, Vec<Posting>>,
    total_len: u64,
}

impl CorpusIndex {
    /// Build from a corpus. Documents are keyed by record id in sorted order,
    /// so the same corpus always produces the same index.
    pub fn build(corpus: &SourceCorpus) -> CorpusIndex {
        let mut docs: Vec<(String, String)> = corpus
            .records
            .iter()
            .map(|r| (r.id.clone(), r.searchable_text()))
            .collect();
        docs.sort_by(|a, b| a.0.cmp(&b.0));

        let mut doc_ids = Vec::with_capacity(docs.len());
        let mut doc_len = Vec::with_capacity(docs.len());
        let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
        let mut total_len: u64 = 0;
        for (doc_idx, (id, text)) in docs.into_iter().enumerate() {
            let tokens = tokenize(&text);
            let mut counts: BTreeMap<String, u32> = BTreeMap::new();
            for t in tokens.iter() {
                *counts.entry(t.clone()).or_insert(0) += 1;
            }
            doc_len.push(tokens.len() as u32);
            total_len += tokens.len() as u64;
            for (token, tf) in counts {
                postings.entry(token).or_default().push(Posting {
                    doc: doc_idx as u32,
                    tf,
                });
            }
            doc_ids.push(id);
        }
        CorpusIndex {
            version: INDEX_FORMAT_VERSION,
            doc_ids,
            doc_len,
            postings,
            total_len,
        }
    }

    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn doc_id(&self, doc: u32) -> &str {
        &self.doc_ids[doc as usize]
    }

    fn avg_doc_len(&self) -> f64 {
        if self.doc_ids.is_empty() {
            0.0
        } else {
            self.total_len as f64 / self.doc_ids.len() as f64
        }
    }

    /// Non-negative BM25 idf.
    fn idf(&self, df: usize) -> f64 {
        let n = self.doc_count() as f64;
        ((n - df as f64 + 0.5) / (df as f64 + 0.5) + 1.0).ln()
    }

    /// Top-k documents for a query string: (record id, score), scores
    /// descending, ties broken by ascending record id.
    pub fn search(&self, query_text: &str, k: usize) -> Vec<(String, f64)> {
        assert!(k >= 1, "search requires k >= 1");
        let tokens = tokenize(query_text);
        if tokens.is_empty() || self.doc_ids.is_empty() {
            return Vec::new();
        }
        let avg = self.avg_doc_len();
        // dense accumulator plus a touched list: query tokens like "salary"
        // hit most of the corpus, and array writes beat map inserts there
        let mut scores = vec![0.0f64; self.doc_ids.len()];
        let mut touched: Vec<u32> = Vec::new();
        // Duplicate query tokens contribute once per occurrence, like a bag.
        for token in &tokens {
            let Some(list) = self.postings.get(token) else {
                continue;
            };
            let idf = self.idf(list.len());
            for posting in list {
                let dl = self.doc_len[posting.doc as usize] as f64;
                let tf = posting.tf as f64;
                let norm = (tf * (BM25_K1 + 1.0)) / (tf + BM25_K1 * (1.0 - BM25_B + BM25_B * dl / avg));
                let slot = &mut scores[posting.doc as usize];
                if *slot == 0.0 {
                    touched.push(posting.doc);
                }
                *slot += idf * norm;
            }
        }
        touched.sort_unstable();
        touched.dedup();
        let mut ranked: Vec<(String, f64)> = touched
            .into_iter()
            .map(|doc| (self.doc_ids[doc as usize].clone(), scores[doc as usize]))
            .collect();
        ranked.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.0.cmp(&b.0))
        });
        ranked.truncate(k);
        ranked
    }

    /// Structural consistency checks, run after deserialization.
    pub fn validate(&self) -> Result<()> {
        if self.version != INDEX_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "index format version {} unsupported (expected {INDEX_FORMAT_VERSION})",
                self.version
            )));
        }
        if self.doc_ids.len() != self.doc_len.len() {
            return Err(Error::Config("index doc tables disagree in length".into()));
        }
        if self.doc_ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("index doc ids not strictly sorted".into()));
        }
        let sum: u64 = self.doc_len.iter().map(|l| *l as u64).sum();
        if sum != self.total_len {
            return Err(Error::Config("index total length inconsistent".into()));
        }
        for (token, list) in &self.postings {
            if list.windows(2).any(|w| w[0].doc >= w[1].doc) {
                return Err(Error::Config(format!(
                    "posting list for {token:?} not sorted by doc"
                )));
            }
            if list.iter().any(|p| p.doc as usize >= self.doc_ids.len()) {
                return Err(Error::Config(format!(
                    "posting list for {token:?} references unknown doc"
                )));
            }
        }
        Ok(())
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_string(self)?;
        std::fs::write(path, body).map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<CorpusIndex> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let index: CorpusIndex = serde_json::from_str(&body)?;
        index.validate()?;
        Ok(index)
    }
}
