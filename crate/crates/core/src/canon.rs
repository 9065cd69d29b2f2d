//! Employer and job-title canonicalization.
//!
//! Noisy surface forms ("U.S.P.S", "Sr. Manager") are collapsed to canonical
//! strings with a lookup table keyed on a normalized form, plus a token-level
//! abbreviation pass that extends coverage to combinations the table does not
//! list verbatim ("Sr. Engineer" -> "Senior Engineer"). Misses pass through
//! unchanged apart from whitespace normalization; there is no fuzzy matching.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which vocabulary a string belongs to. Employer and title aliases live in
/// separate namespaces: "GE" the employer must not collide with a title.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AliasKind {
    Employer,
    Title,
}

impl AliasKind {
    pub fn parse(s: &str) -> Option<AliasKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "employer" => Some(AliasKind::Employer),
            "title" => Some(AliasKind::Title),
            _ => None,
        }
    }
}

/// Lowercase, strip punctuation, collapse whitespace runs, trim.
///
/// Punctuation is removed (not replaced with a space) so dotted acronyms
/// collapse: "U.S.P.S" -> "usps".
pub fn key_normalize(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for ch in raw.chars() {
        if ch.is_whitespace() {
            pending_space = true;
        } else if ch.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            for low in ch.to_lowercase() {
                out.push(low);
            }
        }
        // non-alphanumeric, non-whitespace characters are dropped
    }
    out
}

/// Case-folded alphanumeric tokens; the shared tokenizer for retrieval,
/// bag-of-words features, and employment similarity.
pub fn tokenize(raw: &str) -> Vec<String> {
    raw.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

/// Alias lookup table plus per-kind token expansions.
///
/// Invariant, checked at load: every canonical value is a fixed point of
/// [`AliasTable::canonicalize`], which is what makes canonicalization
/// idempotent as a whole.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AliasTable {
    /// (kind, normalized lookup key) -> canonical surface form.
    entries: BTreeMap<(AliasKind, String), String>,
    /// (kind, normalized single token) -> replacement surface form.
    token_expansions: BTreeMap<(AliasKind, String), String>,
}

impl AliasTable {
    pub fn new() -> Self {
        AliasTable::default()
    }

    /// Insert a whole-string alias. The key is normalized here, so callers
    /// may pass raw surface forms.
    pub fn insert(&mut self, kind: AliasKind, raw: &str, canonical: &str) {
        self.entries
            .insert((kind, key_normalize(raw)), canonical.to_string());
    }

    pub fn insert_token(&mut self, kind: AliasKind, token: &str, replacement: &str) {
        self.token_expansions
            .insert((kind, key_normalize(token)), replacement.to_string());
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn lookup(&self, kind: AliasKind, key: &str) -> Option<&str> {
        self.entries.get(&(kind, key.to_string())).map(|s| s.as_str())
    }

    /// Whole-string lookup, then a token-expansion pass with a second lookup,
    /// then pass-through with normalized whitespace.
    pub fn canonicalize(&self, raw: &str, kind: AliasKind) -> String {
        if let Some(hit) = self.lookup(kind, &key_normalize(raw)) {
            return hit.to_string();
        }
        // Token pass: expand known abbreviations, keep unknown tokens verbatim
        // (original casing and punctuation preserved).
        let mut tokens: Vec<String> = Vec::new();
        for token in raw.split_whitespace() {
            match self.token_expansions.get(&(kind, key_normalize(token))) {
                Some(replacement) => tokens.push(replacement.clone()),
                None => tokens.push(token.to_string()),
            }
        }
        let candidate = tokens.join(" ");
        if let Some(hit) = self.lookup(kind, &key_normalize(&candidate)) {
            return hit.to_string();
        }
        if candidate.is_empty() && !raw.is_empty() {
            // whitespace-only input: pass through rather than emit empty text
            return raw.to_string();
        }
        candidate
    }

    /// Check the fixed-point invariant: canonicalizing any canonical value or
    /// token replacement must return it unchanged.
    pub fn validate(&self) -> Result<()> {
        for ((kind, key), canonical) in &self.entries {
            let again = self.canonicalize(canonical, *kind);
            if &again != canonical {
                return Err(Error::Config(format!(
                    "alias table not idempotent: key {key:?} maps to {canonical:?} \
                     which re-canonicalizes to {again:?}"
                )));
            }
        }
        for ((kind, token), replacement) in &self.token_expansions {
            let again = self.canonicalize(replacement, *kind);
            if &again != replacement {
                return Err(Error::Config(format!(
                    "token expansion not idempotent: {token:?} -> {replacement:?} \
                     re-canonicalizes to {again:?}"
                )));
            }
        }
        Ok(())
    }

    /// Load from CSV with header `kind,raw,canonical`. Rows whose kind is
    /// `token` variants (`employer_token`, `title_token`) feed the token
    /// expansion map.
    pub fn load_csv(path: &Path) -> Result<AliasTable> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)
            .map_err(|e| Error::csv(path, e))?;
        let mut table = AliasTable::new();
        for row in reader.records() {
            let row = row.map_err(|e| Error::csv(path, e))?;
            let (kind_raw, raw, canonical) = match (row.get(0), row.get(1), row.get(2)) {
                (Some(k), Some(r), Some(c)) => (k.trim(), r, c),
                _ => {
                    return Err(Error::Config(format!(
                        "alias table row needs kind,raw,canonical: {row:?}"
                    )))
                }
            };
            match kind_raw {
                "employer_token" => table.insert_token(AliasKind::Employer, raw, canonical),
                "title_token" => table.insert_token(AliasKind::Title, raw, canonical),
                other => {
                    let kind = AliasKind::parse(other).ok_or_else(|| {
                        Error::Config(format!("unknown alias kind {other:?} in {path:?}"))
                    })?;
                    table.insert(kind, raw, canonical);
                }
            }
        }
        table.validate()?;
        Ok(table)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        writer
            .write_record(["kind", "raw", "canonical"])
            .map_err(|e| Error::csv(path, e))?;
        for ((kind, key), canonical) in &self.entries {
            let kind_str = match kind {
                AliasKind::Employer => "employer",
                AliasKind::Title => "title",
            };
            writer
                .write_record([kind_str, key, canonical])
                .map_err(|e| Error::csv(path, e))?;
        }
        for ((kind, token), replacement) in &self.token_expansions {
            let kind_str = match kind {
                AliasKind::Employer => "employer_token",
                AliasKind::Title => "title_token",
            };
            writer
                .write_record([kind_str, token, replacement])
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
    fn key_normalize_strips_punctuation_and_case() {
        assert_eq!(key_normalize("U.S.P.S"), "usps");
        assert_eq!(key_normalize("  Sr.   Manager "), "sr manager");
        assert_eq!(key_normalize("G.E"), "ge");
        assert_eq!(key_normalize(""), "");
    }

    #[test]
    fn key_normalize_is_idempotent_on_random_strings() {
        let mut rng = crate::rng::Rng::new(99);
        let alphabet: Vec<char> =
            "abcXYZ 019.,-_/&()!\t".chars().collect();
        for _ in 0..2000 {
            let len = rng.below(24) as usize;
            let s: String = (0..len)
                .map(|_| *rng.choose(&alphabet))
                .collect();
            let once = key_normalize(&s);
            assert_eq!(key_normalize(&once), once, "input {s:?}");
        }
    }

    #[test]
    fn default_table_maps_published_rows() {
        let table = defaults::alias_table();
        // Employer aliases
        assert_eq!(
            table.canonicalize("U.S.P.S", AliasKind::Employer),
            "United States Postal Service"
        );
        assert_eq!(
            table.canonicalize("U.S. Postal Service", AliasKind::Employer),
            "United States Postal Service"
        );
        assert_eq!(table.canonicalize("GE", AliasKind::Employer), "General Electric");
        assert_eq!(table.canonicalize("G.E", AliasKind::Employer), "General Electric");
        // Title aliases
        assert_eq!(
            table.canonicalize("Acc. Manager", AliasKind::Title),
            "Account Manager"
        );
        assert_eq!(
            table.canonicalize("Sr. Manager", AliasKind::Title),
            "Senior Manager"
        );
        assert_eq!(
            table.canonicalize("Snr. Manager", AliasKind::Title),
            "Senior Manager"
        );
    }

    #[test]
    fn spacing_variants_collapse() {
        let table = defaults::alias_table();
        assert_eq!(
            table.canonicalize("U S P S", AliasKind::Employer),
            "United States Postal Service"
        );
        assert_eq!(
            table.canonicalize("USPS", AliasKind::Employer),
            "United States Postal Service"
        );
    }

    #[test]
    fn miss_passes_through_with_whitespace_normalized() {
        let table = defaults::alias_table();
        assert_eq!(
            table.canonicalize("Zyxcorp LLC", AliasKind::Employer),
            "Zyxcorp LLC"
        );
        assert_eq!(
            table.canonicalize("  Zyxcorp   LLC ", AliasKind::Employer),
            "Zyxcorp LLC"
        );
    }

    #[test]
    fn token_expansion_extends_coverage() {
        let table = defaults::alias_table();
        assert_eq!(
            table.canonicalize("Sr. Software Engineer", AliasKind::Title),
            "Senior Software Engineer"
        );
        assert_eq!(
            table.canonicalize("Acc. Executive", AliasKind::Title),
            "Account Executive"
        );
    }

    #[test]
    fn default_table_is_idempotent() {
        let table = defaults::alias_table();
        table.validate().unwrap();
        for raw in [
            "U.S.P.S",
            "Sr. Manager",
            "GE",
            "Zyxcorp LLC",
            "Sr. Software Engineer",
            "",
            "one",
        ] {
            for kind in [AliasKind::Employer, AliasKind::Title] {
                let once = table.canonicalize(raw, kind);
                assert_eq!(table.canonicalize(&once, kind), once, "raw {raw:?}");
            }
        }
    }

    #[test]
    fn non_empty_input_stays_non_empty() {
        let table = defaults::alias_table();
        assert!(!table.canonicalize("x", AliasKind::Title).is_empty());
        assert!(!table.canonicalize("Q.", AliasKind::Employer).is_empty());
    }

    #[test]
    fn tokenize_splits_on_non_alphanumerics() {
        assert_eq!(tokenize("Software-Engineer II"), vec!["software", "engineer", "ii"]);
        assert_eq!(tokenize(""), Vec::<String>::new());
    }
}
