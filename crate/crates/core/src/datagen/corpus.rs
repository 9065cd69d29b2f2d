//! Raw source-record corpus: the local stand-in for web and database lookups.
//!
//! A corpus is a set of JSON Lines files, one record per line:
//! `{"id": ..., "source_type": ..., "payload": ...}`. Government payloads are
//! flat objects with point salary estimates; salary-site payloads are a site
//! id plus a tree-structured document read with per-site path specs; snippet
//! payloads are free text with a URL.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash)]
#[serde(rename_all = "snake_case")]
pub enum SourceType {
    Government,
    SalarySite,
    Snippet,
}

impl SourceType {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceType::Government => "government",
            SourceType::SalarySite => "salary_site",
            SourceType::Snippet => "snippet",
        }
    }
}

/// Payload formats by source type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Payload {
    /// Government database row: point estimates plus identity columns.
    Government {
        name: String,
        salary: String,
        bonus: String,
        agency: String,
        location: String,
        occupation: String,
        year: i32,
    },
    /// Salary-aggregation site: a site id naming the wrapper spec plus the
    /// site's own tree-structured document.
    SalarySite {
        site: String,
        doc: serde_json::Value,
    },
    /// Free-text search snippet.
    Snippet { text: String, url: String },
}

/// One raw corpus document, still unparsed salary-wise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub id: String,
    pub source_type: SourceType,
    pub payload: Payload,
}

impl RawRecord {
    /// The text the retrieval index sees for this record.
    pub fn searchable_text(&self) -> String {
        match &self.payload {
            Payload::Government {
                name,
                agency,
                location,
                occupation,
                year,
                ..
            } => format!("{name} {agency} {location} {occupation} salary {year}"),
            Payload::SalarySite { site, doc } => {
                let mut parts = vec![site.clone()];
                collect_strings(doc, &mut parts);
                parts.push("salary".to_string());
                parts.join(" ")
            }
            Payload::Snippet { text, .. } => text.clone(),
        }
    }
}

/// Pull every string and small scalar out of a site document, in a stable
/// order, for indexing.
fn collect_strings(value: &serde_json::Value, out: &mut Vec<String>) {
    match value {
        serde_json::Value::String(s) => out.push(s.clone()),
        serde_json::Value::Array(items) => {
            for item in items {
                collect_strings(item, out);
            }
        }
        serde_json::Value::Object(map) => {
            // serde_json's default map preserves insertion order; iterate keys
            // sorted so indexing does not depend on document key order.
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for key in keys {
                collect_strings(&map[key], out);
            }
        }
        _ => {}
    }
}

/// The full record set, id-deduplicated.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SourceCorpus {
    pub records: Vec<RawRecord>,
}

impl SourceCorpus {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn by_id(&self) -> BTreeMap<&str, &RawRecord> {
        self.records
            .iter()
            .map(|r| (r.id.as_str(), r))
            .collect()
    }
}

/// One unparsable line, kept for the error report instead of being silently
/// dropped.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusLineError {
    pub file: PathBuf,
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct CorpusLoadReport {
    pub corpus: SourceCorpus,
    pub errors: Vec<CorpusLineError>,
}

/// Load every `*.jsonl` file under `dir_path` (or a single file if the path
/// is one). Malformed lines are collected into the report; duplicate ids are
/// a hard error naming both files.
pub fn load_corpus(path: &Path) -> Result<CorpusLoadReport> {
    let mut files: Vec<PathBuf> = Vec::new();
    if path.is_dir() {
        for entry in fs::read_dir(path).map_err(|e| Error::io(path, e))? {
            let entry = entry.map_err(|e| Error::io(path, e))?;
            let p = entry.path();
            if p.extension().map(|e| e == "jsonl").unwrap_or(false) {
                files.push(p);
            }
        }
        files.sort();
    } else {
        files.push(path.to_path_buf());
    }

    let mut report = CorpusLoadReport::default();
    let mut seen: BTreeMap<String, PathBuf> = BTreeMap::new();
    for file in files {
        let handle = fs::File::open(&file).map_err(|e| Error::io(&file, e))?;
        for (line_no, line) in BufReader::new(handle).lines().enumerate() {
            let line = line.map_err(|e| Error::io(&file, e))?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<RawRecord>(&line) {
                Ok(record) => {
                    if let Some(first) = seen.get(&record.id) {
                        return Err(Error::DuplicateRecordId {
                            id: record.id,
                            first: first.display().to_string(),
                            second: file.display().to_string(),
                        });
                    }
                    seen.insert(record.id.clone(), file.clone());
                    report.corpus.records.push(record);
                }
                Err(e) => report.errors.push(CorpusLineError {
                    file: file.clone(),
                    line: line_no + 1,
                    reason: e.to_string(),
                }),
            }
        }
    }
    // Merge order must not depend on directory listing quirks.
    report.corpus.records.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(report)
}

/// Write a corpus as JSON Lines.
pub fn save_corpus(corpus: &SourceCorpus, path: &Path) -> Result<()> {
    let mut out = String::new();
    for record in &corpus.records {
        out.push_str(&serde_json::to_string(record)?);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gov_line(id: &str) -> String {
        format!(
            r#"{{"id":"{id}","source_type":"government","payload":{{"name":"James Bond","salary":"$73,482","bonus":"$0","agency":"Department of Homeland Security","location":"SELLS","occupation":"Medical Technologist","year":2016}}}}"#
        )
    }

    #[test]
    fn empty_directory_is_an_empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let report = load_corpus(dir.path()).unwrap();
        assert!(report.corpus.is_empty());
        assert!(report.errors.is_empty());
    }

    #[test]
    fn loads_government_record() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("gov.jsonl"), gov_line("gov-1") + "\n").unwrap();
        let report = load_corpus(dir.path()).unwrap();
        assert_eq!(report.corpus.len(), 1);
        assert!(report.errors.is_empty());
        match &report.corpus.records[0].payload {
            Payload::Government { salary, bonus, .. } => {
                assert_eq!(salary, "$73,482");
                assert_eq!(bonus, "$0");
            }
            other => panic!("wrong payload {other:?}"),
        }
    }

    #[test]
    fn malformed_line_goes_to_error_report() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!("{}\nnot json at all\n", gov_line("gov-1"));
        fs::write(dir.path().join("mixed.jsonl"), body).unwrap();
        let report = load_corpus(dir.path()).unwrap();
        assert_eq!(report.corpus.len(), 1);
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].line, 2);
    }

    #[test]
    fn duplicate_id_is_a_hard_error_naming_both_files() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.jsonl"), gov_line("dup-1") + "\n").unwrap();
        fs::write(dir.path().join("b.jsonl"), gov_line("dup-1") + "\n").unwrap();
        let err = load_corpus(dir.path()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("dup-1"), "{msg}");
        assert!(msg.contains("a.jsonl") && msg.contains("b.jsonl"), "{msg}");
    }

    #[test]
    fn corpus_round_trips_through_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!(
            "{}\n{}\n",
            gov_line("gov-1"),
            r#"{"id":"snip-1","source_type":"snippet","payload":{"text":"The average Software Engineer salary is $100,000","url":"https://example.test/1"}}"#
        );
        let file = dir.path().join("c.jsonl");
        fs::write(&file, body).unwrap();
        let loaded = load_corpus(&file).unwrap().corpus;
        let out = dir.path().join("out.jsonl");
        save_corpus(&loaded, &out).unwrap();
        let reloaded = load_corpus(&out).unwrap().corpus;
        assert_eq!(loaded.records, reloaded.records);
    }

    #[test]
    fn searchable_text_covers_payload_fields() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("c.jsonl");
        fs::write(&file, gov_line("gov-1")).unwrap();
        let corpus = load_corpus(&file).unwrap().corpus;
        let text = corpus.records[0].searchable_text();
        assert!(text.contains("James Bond"));
        assert!(text.contains("Medical Technologist"));
    }
}
