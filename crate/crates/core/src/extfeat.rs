//! External feature assembly: top-5 source selection, industry-ratio
//! imputation, and the fixed 35-dimensional feature vector.
//!
//! Layout: five source slots ordered by descending match score, each slot
//! holding the six salary-attribute-to-stated-income ratios (base
//! low/median/high, total low/median/high) followed by the match score.
//! Empty slots are zero-filled, which is unambiguous because genuine ratios
//! and match scores are positive.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{SalaryAttr, SalaryAttributes};
use crate::industry::Industry;
use crate::matching::MatchResult;
use crate::money::Money;

/// Sources kept per identity.
pub const SOURCE_SLOTS: usize = 5;
/// Features per slot: six attribute ratios plus the match score.
pub const SLOT_WIDTH: usize = 7;
/// Total external feature dimension.
pub const EXTERNAL_DIM: usize = SOURCE_SLOTS * SLOT_WIDTH;

/// Relative scale of each attribute used to seed the global fallback row
/// when a corpus has no complete pairs at all: ratio(i/j) = scale_i/scale_j.
const DEFAULT_ATTR_SCALE: [f64; 6] = [0.80, 1.00, 1.30, 0.90, 1.15, 1.50];

/// Mean attribute-to-attribute ratios, per industry with a global fallback.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioTable {
    /// per-industry ratio matrix: entry[i][j] estimates attr_i / attr_j
    industries: BTreeMap<Industry, [[f64; 6]; 6]>,
    /// per-industry pair support counts
    support: BTreeMap<Industry, [[u32; 6]; 6]>,
    global: [[f64; 6]; 6],
    global_support: [[u32; 6]; 6],
    /// set when some global pair had no data and fell back to the seeded
    /// default constants
    pub used_default_seed: bool,
    /// pairs with fewer than this many supporting records fall back to the
    /// global row
    pub min_support: u32,
}

fn default_matrix() -> [[f64; 6]; 6] {
    let mut m = [[1.0; 6]; 6];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = DEFAULT_ATTR_SCALE[i] / DEFAULT_ATTR_SCALE[j];
        }
    }
    m
}

/// Build the ratio table from extracted corpus records: for every industry
/// and ordered attribute pair, the mean of attr_i/attr_j over records where
/// both are present. Pairs with fewer than `min_support` records defer to
/// the global row; a global pair with no data at all uses seeded defaults.
pub fn build_ratio_table(
    records: impl Iterator<Item = (Option<Industry>, SalaryAttributes)>,
    min_support: u32,
) -> RatioTable {
    #[derive(Default, Clone, Copy)]
    struct Acc {
        sum: f64,
        n: u32,
    }
    let mut per_industry: BTreeMap<Industry, [[Acc; 6]; 6]> = BTreeMap::new();
    let mut global = [[Acc::default(); 6]; 6];

    for (industry, attrs) in records {
        for (i, attr_i) in SalaryAttr::ALL.iter().enumerate() {
            let Some(vi) = attrs.get(*attr_i) else { continue };
            for (j, attr_j) in SalaryAttr::ALL.iter().enumerate() {
                let Some(vj) = attrs.get(*attr_j) else { continue };
                if vj.is_zero() {
                    continue;
                }
                let ratio = vi.as_dollars_f64() / vj.as_dollars_f64();
                global[i][j].sum += ratio;
                global[i][j].n += 1;
                if let Some(ind) = industry {
                    let acc = per_industry.entry(ind).or_insert([[Acc::default(); 6]; 6]);
                    acc[i][j].sum += ratio;
                    acc[i][j].n += 1;
                }
            }
        }
    }

    let defaults = default_matrix();
    let mut used_default_seed = false;
    let mut global_matrix = [[1.0; 6]; 6];
    let mut global_support = [[0u32; 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            global_support[i][j] = global[i][j].n;
            global_matrix[i][j] = if i == j {
                1.0
            } else if global[i][j].n > 0 {
                global[i][j].sum / global[i][j].n as f64
            } else {
                used_default_seed = true;
                defaults[i][j]
            };
        }
    }

    let mut industries = BTreeMap::new();
    let mut support = BTreeMap::new();
    for (industry, acc) in per_industry {
        let mut matrix = [[1.0; 6]; 6];
        let mut counts = [[0u32; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                counts[i][j] = acc[i][j].n;
                matrix[i][j] = if i == j {
                    1.0
                } else if acc[i][j].n >= min_support {
                    acc[i][j].sum / acc[i][j].n as f64
                } else {
                    global_matrix[i][j]
                };
            }
        }
        industries.insert(industry, matrix);
        support.insert(industry, counts);
    }

    RatioTable {
        industries,
        support,
        global: global_matrix,
        global_support,
        used_default_seed,
        min_support,
    }
}

impl RatioTable {
    /// Estimated ratio attr_i / attr_j for an industry (global fallback).
    pub fn ratio(&self, industry: Option<Industry>, i: SalaryAttr, j: SalaryAttr) -> f64 {
        let (ii, jj) = (i.index(), j.index());
        match industry.and_then(|ind| self.industries.get(&ind)) {
            Some(matrix) => matrix[ii][jj],
            None => self.global[ii][jj],
        }
    }

    pub fn pair_support(&self, industry: Option<Industry>, i: SalaryAttr, j: SalaryAttr) -> u32 {
        let (ii, jj) = (i.index(), j.index());
        match industry.and_then(|ind| self.support.get(&ind)) {
            Some(counts) => counts[ii][jj],
            None => self.global_support[ii][jj],
        }
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_string_pretty(self)?;
        std::fs::write(path, body).map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<RatioTable> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&body)?)
    }
}

/// Imputation outcome: filled attributes, or a discard signal when no
/// attribute was present to anchor on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Imputed {
    Filled(SalaryAttributes),
    Discard,
}

/// Fill absent attributes from the highest-priority present attribute times
/// the industry ratio. Present attributes are never modified; imputed values
/// are clamped so the low <= median <= high invariant survives.
pub fn impute_attributes(
    attrs: &SalaryAttributes,
    industry: Option<Industry>,
    table: &RatioTable,
) -> Imputed {
    if attrs.is_all_absent() {
        return Imputed::Discard;
    }
    let anchor = *SalaryAttr::FILL_PRIORITY
        .iter()
        .find(|a| attrs.get(**a).is_some())
        .expect("non-empty attributes have an anchor");
    let anchor_value = attrs.get(anchor).unwrap().as_dollars_f64();

    let mut filled = *attrs;
    for attr in SalaryAttr::ALL {
        if filled.get(attr).is_none() {
            let estimate = anchor_value * table.ratio(industry, attr, anchor);
            filled.set(attr, Money::from_dollars_f64(estimate.max(0.0)));
        }
    }
    // Clamp imputed values onto the ordering established by present ones:
    // median first (bounded by any present endpoints), then the endpoints
    // against the median. Present values are untouched and are already
    // mutually consistent, so the result always satisfies low <= median <= high.
    let mut clamp_triple = |low: SalaryAttr, median: SalaryAttr, high: SalaryAttr| {
        let was_present = |a: SalaryAttr| attrs.get(a).is_some();
        if !was_present(median) {
            let mut m = filled.get(median).unwrap();
            if was_present(low) {
                m = m.max(filled.get(low).unwrap());
            }
            if was_present(high) {
                m = m.min(filled.get(high).unwrap());
            }
            filled.set(median, m);
        }
        let m = filled.get(median).unwrap();
        if !was_present(low) && filled.get(low).unwrap() > m {
            filled.set(low, m);
        }
        if !was_present(high) && filled.get(high).unwrap() < m {
            filled.set(high, m);
        }
    };
    clamp_triple(SalaryAttr::BaseLow, SalaryAttr::BaseMedian, SalaryAttr::BaseHigh);
    clamp_triple(SalaryAttr::TotalLow, SalaryAttr::TotalMedian, SalaryAttr::TotalHigh);
    Imputed::Filled(filled)
}

/// The fixed-width external feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalFeatureVector {
    values: Vec<f64>,
}

impl ExternalFeatureVector {
    pub fn zeros() -> ExternalFeatureVector {
        ExternalFeatureVector {
            values: vec![0.0; EXTERNAL_DIM],
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Column names in vector order, for the debug CSV export.
    pub fn column_names() -> Vec<String> {
        let mut names = Vec::with_capacity(EXTERNAL_DIM);
        for slot in 0..SOURCE_SLOTS {
            for attr in SalaryAttr::ALL {
                names.push(format!("s{}_{}", slot + 1, attr.name()));
            }
            names.push(format!("s{}_match_score", slot + 1));
        }
        names
    }
}

/// Assemble the external vector for one identity.
///
/// Matches are ranked by score descending (ties by ascending record id), the
/// top five surviving imputation fill the slots in order, and remaining
/// slots stay zero. Requires a positive stated income.
pub fn build_external_features(
    stated_income: Money,
    matches: &[MatchResult],
    attrs_by_record: &BTreeMap<String, (Option<Industry>, SalaryAttributes)>,
    ratios: &RatioTable,
) -> Result<ExternalFeatureVector> {
    if stated_income.is_zero() {
        return Err(Error::Contract(
            "external features require a positive stated income".into(),
        ));
    }
    let stated = stated_income.as_dollars_f64();
    let mut ranked: Vec<&MatchResult> = matches.iter().collect();
    ranked.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.record_id.cmp(&b.record_id))
    });

    let mut vector = vec![0.0; EXTERNAL_DIM];
    let mut slot = 0usize;
    for result in ranked {
        if slot == SOURCE_SLOTS {
            break;
        }
        let Some((industry, attrs)) = attrs_by_record.get(&result.record_id) else {
            continue;
        };
        let filled = match impute_attributes(attrs, *industry, ratios) {
            Imputed::Filled(filled) => filled,
            Imputed::Discard => continue,
        };
        let base = slot * SLOT_WIDTH;
        for (k, attr) in SalaryAttr::ALL.iter().enumerate() {
            vector[base + k] = filled.get(*attr).unwrap().as_dollars_f64() / stated;
        }
        vector[base + 6] = result.score;
        slot += 1;
    }
    Ok(ExternalFeatureVector { values: vector })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{bucket_for, MatchFeatures};

    fn attrs(values: [Option<u64>; 6]) -> SalaryAttributes {
        let mut a = SalaryAttributes::default();
        for (k, v) in values.iter().enumerate() {
            if let Some(dollars) = v {
                a.set(SalaryAttr::ALL[k], Money::from_dollars(*dollars));
            }
        }
        a
    }

    #[test]
    fn constant_ratio_corpus_recovers_the_ratio() {
        // every record has base_median = 0.8 x total_median
        let records = (0..10).map(|i| {
            let total = 100_000 + i * 1_000;
            (
                Some(Industry::Technology),
                attrs([None, Some(total * 8 / 10), None, None, Some(total), None]),
            )
        });
        let table = build_ratio_table(records, 5);
        let r = table.ratio(
            Some(Industry::Technology),
            SalaryAttr::BaseMedian,
            SalaryAttr::TotalMedian,
        );
        assert!((r - 0.8).abs() < 1e-9, "{r}");
        // diagonal is exactly 1
        let rd = table.ratio(Some(Industry::Technology), SalaryAttr::BaseLow, SalaryAttr::BaseLow);
        assert_eq!(rd, 1.0);
    }

    #[test]
    fn thin_industry_falls_back_to_global() {
        let records = vec![
            // 6 technology records support the pair
            (Some(Industry::Technology), attrs([None, Some(80), None, None, Some(100), None])),
            (Some(Industry::Technology), attrs([None, Some(80), None, None, Some(100), None])),
            (Some(Industry::Technology), attrs([None, Some(80), None, None, Some(100), None])),
            (Some(Industry::Technology), attrs([None, Some(80), None, None, Some(100), None])),
            (Some(Industry::Technology), attrs([None, Some(80), None, None, Some(100), None])),
            (Some(Industry::Technology), attrs([None, Some(80), None, None, Some(100), None])),
            // a single retail record with a very different ratio
            (Some(Industry::Retail), attrs([None, Some(50), None, None, Some(100), None])),
        ];
        let table = build_ratio_table(records.into_iter(), 5);
        let retail = table.ratio(
            Some(Industry::Retail),
            SalaryAttr::BaseMedian,
            SalaryAttr::TotalMedian,
        );
        let global = table.ratio(None, SalaryAttr::BaseMedian, SalaryAttr::TotalMedian);
        // retail had only 1 supporting record -> falls back to global mean
        assert!((retail - global).abs() < 1e-12);
        // global mean of [0.8 x6, 0.5] = (4.8 + 0.5)/7
        assert!((global - (4.8 + 0.5) / 7.0).abs() < 1e-9);
    }

    #[test]
    fn empty_corpus_seeds_defaults_and_flags() {
        let table = build_ratio_table(std::iter::empty(), 5);
        assert!(table.used_default_seed);
        let r = table.ratio(None, SalaryAttr::BaseLow, SalaryAttr::BaseMedian);
        assert!((r - 0.8).abs() < 1e-12);
        assert_eq!(table.pair_support(None, SalaryAttr::BaseLow, SalaryAttr::BaseMedian), 0);
    }

    /// Independent mean computation over the shipped-style toy corpus, the
    /// way one would do it in a spreadsheet: collect each record's ratio in a
    /// list, average the list.
    #[test]
    fn table_matches_spreadsheet_oracle() {
        let data = vec![
            (Some(Industry::Finance), attrs([Some(70), Some(100), Some(130), None, None, None])),
            (Some(Industry::Finance), attrs([Some(80), Some(110), Some(150), None, None, None])),
            (Some(Industry::Finance), attrs([Some(75), Some(105), Some(140), None, None, None])),
            (Some(Industry::Finance), attrs([Some(90), Some(120), Some(160), None, None, None])),
            (Some(Industry::Finance), attrs([Some(85), Some(115), Some(145), None, None, None])),
        ];
        let table = build_ratio_table(data.clone().into_iter(), 5);
        let spreadsheet: Vec<f64> = data
            .iter()
            .map(|(_, a)| {
                a.get(SalaryAttr::BaseLow).unwrap().as_dollars_f64()
                    / a.get(SalaryAttr::BaseMedian).unwrap().as_dollars_f64()
            })
            .collect();
        let mean = spreadsheet.iter().sum::<f64>() / spreadsheet.len() as f64;
        let got = table.ratio(Some(Industry::Finance), SalaryAttr::BaseLow, SalaryAttr::BaseMedian);
        assert!((got - mean).abs() < 1e-12);
    }

    #[test]
    fn imputation_never_touches_present_values() {
        let table = build_ratio_table(std::iter::empty(), 5);
        let full = attrs([Some(70), Some(100), Some(130), Some(80), Some(115), Some(150)]);
        match impute_attributes(&full, None, &table) {
            Imputed::Filled(out) => assert_eq!(out, full),
            Imputed::Discard => panic!("full attributes discarded"),
        }
    }

    #[test]
    fn single_total_median_fills_base_median_via_ratio() {
        // table with r[base_median/total_median] = 0.8 learned from data
        let records = (0..6).map(|_| {
            (None, attrs([None, Some(80_000), None, None, Some(100_000), None]))
        });
        let table = build_ratio_table(records, 5);
        let partial = attrs([None, None, None, None, Some(100_000), None]);
        match impute_attributes(&partial, None, &table) {
            Imputed::Filled(out) => {
                let got = out.get(SalaryAttr::BaseMedian).unwrap().as_dollars_f64();
                assert!((got - 80_000.0).abs() < 1.0, "{got}");
                // present anchor unchanged
                assert_eq!(out.get(SalaryAttr::TotalMedian), Some(Money::from_dollars(100_000)));
            }
            Imputed::Discard => panic!("anchored attributes discarded"),
        }
    }

    #[test]
    fn all_absent_is_discarded() {
        let table = build_ratio_table(std::iter::empty(), 5);
        assert_eq!(
            impute_attributes(&SalaryAttributes::default(), None, &table),
            Imputed::Discard
        );
    }

    #[test]
    fn imputation_is_idempotent() {
        let table = build_ratio_table(std::iter::empty(), 5);
        let partial = attrs([None, Some(100_000), None, None, None, None]);
        let once = match impute_attributes(&partial, None, &table) {
            Imputed::Filled(out) => out,
            Imputed::Discard => panic!(),
        };
        let twice = match impute_attributes(&once, None, &table) {
            Imputed::Filled(out) => out,
            Imputed::Discard => panic!(),
        };
        assert_eq!(once, twice);
        // invariant survives imputation
        assert!(once.validated().is_ok());
    }

    fn match_result(id: &str, score: f64) -> MatchResult {
        MatchResult {
            record_id: id.to_string(),
            score,
            bucket: bucket_for(score),
            features: MatchFeatures::default(),
        }
    }

    fn record_map(
        entries: &[(&str, SalaryAttributes)],
    ) -> BTreeMap<String, (Option<Industry>, SalaryAttributes)> {
        entries
            .iter()
            .map(|(id, a)| (id.to_string(), (None, *a)))
            .collect()
    }

    #[test]
    fn five_full_sources_fill_all_slots() {
        let table = build_ratio_table(std::iter::empty(), 5);
        let full = attrs([Some(70_000), Some(100_000), Some(130_000), Some(80_000), Some(115_000), Some(150_000)]);
        let records = record_map(&[
            ("a", full), ("b", full), ("c", full), ("d", full), ("e", full),
        ]);
        let matches: Vec<MatchResult> = ["a", "b", "c", "d", "e"]
            .iter()
            .enumerate()
            .map(|(i, id)| match_result(id, 0.9 - 0.1 * i as f64))
            .collect();
        let v = build_external_features(Money::from_dollars(100_000), &matches, &records, &table)
            .unwrap();
        assert_eq!(v.len(), EXTERNAL_DIM);
        assert!(v.as_slice().iter().all(|x| *x != 0.0));
        // slot 1 ratio for base_median is 100k/100k = 1.0
        assert!((v.as_slice()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_survivors_is_all_zero() {
        let table = build_ratio_table(std::iter::empty(), 5);
        let v = build_external_features(
            Money::from_dollars(100_000),
            &[],
            &BTreeMap::new(),
            &table,
        )
        .unwrap();
        assert_eq!(v.len(), EXTERNAL_DIM);
        assert!(v.as_slice().iter().all(|x| *x == 0.0));
    }

    #[test]
    fn slots_order_by_score_then_id_and_permutation_is_irrelevant() {
        let table = build_ratio_table(std::iter::empty(), 5);
        let a = attrs([None, Some(50_000), None, None, None, None]);
        let b = attrs([None, Some(150_000), None, None, None, None]);
        let records = record_map(&[("a", a), ("b", b)]);
        let m1 = vec![match_result("a", 0.9), match_result("b", 0.7)];
        let m2 = vec![match_result("b", 0.7), match_result("a", 0.9)];
        let v1 = build_external_features(Money::from_dollars(100_000), &m1, &records, &table).unwrap();
        let v2 = build_external_features(Money::from_dollars(100_000), &m2, &records, &table).unwrap();
        assert_eq!(v1, v2);
        // slot 1 is record "a" (higher score): base_median ratio 0.5
        assert!((v1.as_slice()[1] - 0.5).abs() < 1e-12);
        // tie case: same score, ascending id wins slot 1
        let m3 = vec![match_result("b", 0.9), match_result("a", 0.9)];
        let v3 = build_external_features(Money::from_dollars(100_000), &m3, &records, &table).unwrap();
        assert!((v3.as_slice()[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn discarded_sources_skip_slots() {
        let table = build_ratio_table(std::iter::empty(), 5);
        let empty = SalaryAttributes::default();
        let good = attrs([None, Some(100_000), None, None, None, None]);
        let records = record_map(&[("bad", empty), ("good", good)]);
        let matches = vec![match_result("bad", 0.95), match_result("good", 0.6)];
        let v = build_external_features(Money::from_dollars(100_000), &matches, &records, &table)
            .unwrap();
        // slot 1 belongs to "good" despite its lower score
        assert!((v.as_slice()[1] - 1.0).abs() < 1e-12);
        assert!((v.as_slice()[6] - 0.6).abs() < 1e-12);
        // remaining slots zero
        assert!(v.as_slice()[SLOT_WIDTH..].iter().all(|x| *x == 0.0));
    }

    #[test]
    fn zero_stated_income_is_a_contract_violation() {
        let table = build_ratio_table(std::iter::empty(), 5);
        assert!(build_external_features(Money::ZERO, &[], &BTreeMap::new(), &table).is_err());
    }

    #[test]
    fn doubling_stated_income_halves_ratio_coordinates() {
        let table = build_ratio_table(std::iter::empty(), 5);
        let a = attrs([Some(70_000), Some(100_000), Some(130_000), None, None, None]);
        let records = record_map(&[("a", a)]);
        let matches = vec![match_result("a", 0.85)];
        let v1 = build_external_features(Money::from_dollars(100_000), &matches, &records, &table).unwrap();
        let v2 = build_external_features(Money::from_dollars(200_000), &matches, &records, &table).unwrap();
        for k in 0..6 {
            assert!((v2.as_slice()[k] - v1.as_slice()[k] / 2.0).abs() < 1e-12);
        }
        // match-score coordinate unchanged
        assert_eq!(v1.as_slice()[6], v2.as_slice()[6]);
    }

    #[test]
    fn column_names_cover_the_layout() {
        let names = ExternalFeatureVector::column_names();
        assert_eq!(names.len(), EXTERNAL_DIM);
        assert_eq!(names[0], "s1_base_low");
        assert_eq!(names[6], "s1_match_score");
        assert_eq!(names[34], "s5_match_score");
    }
}
