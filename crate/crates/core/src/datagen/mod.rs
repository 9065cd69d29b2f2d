//! Dataset construction: H-1B disclosure ingestion, corpus loading, and the
//! seeded synthetic benchmark generator.
//!
//! The synthetic world draws each person's income from a log-normal model
//! with systematic title/employer/state effects plus an idiosyncratic
//! residual, then manufactures the public record corpus around it:
//! government rows carry the person's actual salary, salary sites and
//! snippets carry occupation-level estimates centered on the systematic part
//! of the income. Stated incomes are truthful except for a configurable
//! fraction of inflated claims. Everything is a pure function of the config,
//! including the seed, so two runs produce byte-identical files.

pub mod corpus;
pub mod dataset;
pub mod hib;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::canon::{key_normalize, AliasKind};
use crate::defaults;
use crate::domain::{Address, Identity, PersonName};
use crate::error::{Error, Result};
use crate::industry::Industry;
use crate::money::Money;
use crate::rng::Rng;
use corpus::{Payload, RawRecord, SourceCorpus, SourceType};

/// One regression example: an input row plus its verified income.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub id: String,
    pub identity: Identity,
    pub true_income: Money,
}

/// Ground-truth co-reference label for an (identity, record) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchLabel {
    pub identity_id: String,
    pub record_id: String,
    pub label: bool,
}

/// A row of the bundled external text corpus (the stand-in for large public
/// title/income datasets used to pre-train and tune word vectors).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalTextRow {
    pub job_title: String,
    pub employer: String,
    pub income: Money,
}

/// Synthetic benchmark configuration. `Default` is the shipped benchmark:
/// the client-style dataset shape (3108 train rows, mean 77571.76, stddev
/// 57979.323) under seed 42.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_rows: usize,
    pub test_rows: usize,
    pub income_mean: Money,
    pub income_stddev: Money,
    /// Fraction of inputs whose employer/title arrives as a noisy alias.
    pub alias_noise: f64,
    /// Fraction of people who state a significantly higher income.
    pub income_inflation_rate: f64,
    pub inflation_factor_range: (f64, f64),
    /// Co-referent source records per identity, inclusive range.
    pub sources_per_identity: (u64, u64),
    /// Expected unrelated records added per identity.
    pub distractor_rate: f64,
    /// Log-scale standard deviation of the idiosyncratic income residual
    /// (the part no input feature explains).
    pub idiosyncratic_sigma: f64,
    /// Rescale drawn incomes so the sample mean/stddev hit the targets
    /// exactly rather than in expectation.
    pub exact_moments: bool,
    /// Rows in the bundled external text corpus.
    pub external_rows: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_rows: 3108,
            test_rows: 1037,
            income_mean: Money::from_dollars_f64(77_571.760),
            income_stddev: Money::from_dollars_f64(57_979.323),
            alias_noise: 0.25,
            income_inflation_rate: 0.25,
            inflation_factor_range: (1.25, 2.0),
            sources_per_identity: (3, 5),
            distractor_rate: 0.5,
            idiosyncratic_sigma: 0.32,
            exact_moments: true,
            external_rows: 5000,
            seed: 42,
        }
    }
}

impl SynthConfig {
    /// The H-1B-style dataset shape.
    pub fn hib_preset(seed: u64) -> SynthConfig {
        SynthConfig {
            n_rows: 7500,
            test_rows: 2500,
            income_mean: Money::from_dollars_f64(91_411.177),
            income_stddev: Money::from_dollars_f64(46_969.135),
            seed,
            ..SynthConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rows == 0 {
            return Err(Error::Config("n_rows must be >= 1".into()));
        }
        for (name, rate) in [
            ("alias_noise", self.alias_noise),
            ("income_inflation_rate", self.income_inflation_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::Config(format!("{name} must be in [0,1], got {rate}")));
            }
        }
        let (lo, hi) = self.inflation_factor_range;
        if !(lo >= 1.0 && hi >= lo) {
            return Err(Error::Config(format!(
                "inflation_factor_range must satisfy 1 <= lo <= hi, got ({lo}, {hi})"
            )));
        }
        let (smin, smax) = self.sources_per_identity;
        if smax < smin {
            return Err(Error::Config("sources_per_identity max < min".into()));
        }
        if self.income_mean.is_zero() || self.income_stddev.is_zero() {
            return Err(Error::Config("income mean/stddev must be positive".into()));
        }
        if self.idiosyncratic_sigma < 0.0 {
            return Err(Error::Config("idiosyncratic_sigma must be >= 0".into()));
        }
        Ok(())
    }
}

/// Everything one synthetic run produces.
#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub train: Vec<LabeledExample>,
    pub test: Vec<LabeledExample>,
    pub corpus: SourceCorpus,
    pub match_labels: Vec<MatchLabel>,
    pub external_text: Vec<ExternalTextRow>,
}

/// Format whole dollars with thousands separators, e.g. `$73,482`.
pub fn format_dollars(amount: Money) -> String {
    let dollars = amount.cents() / 100;
    let digits = dollars.to_string();
    let mut out = String::from("$");
    let first_group = digits.len() % 3;
    for (i, ch) in digits.chars().enumerate() {
        if i != 0 && (i + 3 - first_group) % 3 == 0 {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

/// A person drawn from the synthetic world, before identity assembly.
struct DrawnPerson {
    title_idx: usize,
    employer_idx: usize,
    state_idx: usize,
    city_idx: usize,
    /// systematic log-income effect (title + employer + state)
    systematic_ln: f64,
    /// idiosyncratic log-income residual
    residual_ln: f64,
    name: PersonName,
    street: String,
    dob: chrono::NaiveDate,
}

fn draw_person(rng: &mut Rng, cfg: &SynthConfig) -> DrawnPerson {
    let title_idx = rng.below(defaults::TITLES.len() as u64) as usize;
    let employer_idx = rng.below(defaults::EMPLOYERS.len() as u64) as usize;
    let state_idx = rng.below(defaults::STATES.len() as u64) as usize;
    let city_idx = rng.below(2) as usize;
    let systematic_ln = defaults::TITLES[title_idx].ln_mult
        + defaults::EMPLOYERS[employer_idx].ln_mult
        + defaults::STATES[state_idx].ln_mult;
    let residual_ln = cfg.idiosyncratic_sigma * rng.normal();
    let first = *rng.choose(defaults::FIRST_NAMES);
    let last = *rng.choose(defaults::LAST_NAMES);
    let middle = if rng.chance(0.6) {
        let m = *rng.choose(defaults::FIRST_NAMES);
        if rng.chance(0.5) {
            Some(m[..1].to_string())
        } else {
            Some(m.to_string())
        }
    } else {
        None
    };
    let street = format!(
        "{} {} {}",
        rng.range_inclusive(1, 9999),
        rng.choose(defaults::STREET_NAMES),
        rng.choose(defaults::STREET_SUFFIXES)
    );
    let year = rng.range_inclusive(1955, 1995) as i32;
    let month = rng.range_inclusive(1, 12) as u32;
    let day = rng.range_inclusive(1, 28) as u32;
    let dob = chrono::NaiveDate::from_ymd_opt(year, month, day).unwrap();
    DrawnPerson {
        title_idx,
        employer_idx,
        state_idx,
        city_idx,
        systematic_ln,
        residual_ln,
        name: PersonName {
            first: first.to_string(),
            middle,
            last: last.to_string(),
        },
        street,
        dob,
    }
}

/// Affine map fitted per split so the sample mean/stddev equal the targets.
#[derive(Debug, Clone, Copy)]
struct MomentMap {
    scale: f64,
    shift: f64,
}

impl MomentMap {
    fn identity() -> MomentMap {
        MomentMap { scale: 1.0, shift: 0.0 }
    }

    fn fit(raw: &[f64], target_mean: f64, target_std: f64) -> MomentMap {
        let n = raw.len() as f64;
        let mean = raw.iter().sum::<f64>() / n;
        if raw.len() < 2 {
            return MomentMap { scale: 1.0, shift: target_mean - mean };
        }
        let var = raw.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        let scale = if var > 0.0 { target_std / var.sqrt() } else { 1.0 };
        MomentMap {
            scale,
            shift: target_mean - scale * mean,
        }
    }

    fn apply(&self, x: f64) -> f64 {
        // Floor keeps the left tail positive; with log-normal draws the floor
        // is essentially never active at the shipped settings.
        (self.scale * x + self.shift).max(2_000.0)
    }
}

/// Corpus/label accumulator used during generation.
struct GenState {
    corpus: SourceCorpus,
    match_labels: Vec<MatchLabel>,
    by_title: BTreeMap<String, Vec<String>>,
    seq: u64,
}

impl GenState {
    fn new() -> GenState {
        GenState {
            corpus: SourceCorpus::default(),
            match_labels: Vec::new(),
            by_title: BTreeMap::new(),
            seq: 0,
        }
    }

    fn push_record(
        &mut self,
        prefix: &str,
        source_type: SourceType,
        payload: Payload,
        title: &str,
    ) -> String {
        self.seq += 1;
        let id = format!("{prefix}-{:06}", self.seq);
        self.corpus.records.push(RawRecord {
            id: id.clone(),
            source_type,
            payload,
        });
        self.by_title
            .entry(key_normalize(title))
            .or_default()
            .push(id.clone());
        id
    }

    fn push_label(&mut self, identity_id: &str, record_id: &str, label: bool) {
        self.match_labels.push(MatchLabel {
            identity_id: identity_id.to_string(),
            record_id: record_id.to_string(),
            label,
        });
    }
}

/// Deterministic synthetic benchmark generation.
pub fn generate_synthetic(config: &SynthConfig) -> Result<SynthOutput> {
    config.validate()?;
    let root = Rng::new(config.seed);
    let mut people_rng = root.fork("people");
    let mut sources_rng = root.fork("sources");
    let mut labels_rng = root.fork("labels");
    let mut external_rng = root.fork("external");
    let aliases = defaults::alias_table();

    let ln_base = config.income_mean.as_dollars_f64().ln();
    let total = config.n_rows + config.test_rows;
    let people: Vec<DrawnPerson> = (0..total)
        .map(|_| draw_person(&mut people_rng, config))
        .collect();

    // Raw incomes, then per-split moment correction.
    let raw_income = |p: &DrawnPerson| (ln_base + p.systematic_ln + p.residual_ln).exp();
    let target_mean = config.income_mean.as_dollars_f64();
    let target_std = config.income_stddev.as_dollars_f64();
    let train_raw: Vec<f64> = people[..config.n_rows].iter().map(raw_income).collect();
    let test_raw: Vec<f64> = people[config.n_rows..].iter().map(raw_income).collect();
    let train_map = if config.exact_moments {
        MomentMap::fit(&train_raw, target_mean, target_std)
    } else {
        MomentMap::identity()
    };
    let test_map = if config.exact_moments && !test_raw.is_empty() {
        MomentMap::fit(&test_raw, target_mean, target_std)
    } else {
        MomentMap::identity()
    };

    let mut train = Vec::with_capacity(config.n_rows);
    let mut test = Vec::with_capacity(config.test_rows);
    let mut state = GenState::new();

    for (i, person) in people.iter().enumerate() {
        let is_train = i < config.n_rows;
        let map = if is_train { train_map } else { test_map };
        let true_dollars = map.apply(raw_income(person));
        let true_income = Money::from_dollars_f64(true_dollars);
        let identity_id = format!("id-{:06}", i + 1);

        // Stated income: truthful except for the inflated fraction.
        let stated = if people_rng.chance(config.income_inflation_rate) {
            let (lo, hi) = config.inflation_factor_range;
            Money::from_dollars_f64(true_dollars * people_rng.uniform(lo, hi))
        } else {
            true_income
        };

        // Occupation-level anchor: the systematic part of the income pushed
        // through the same moment map, so source records live on the corrected
        // scale. exp(sigma^2/2) centers the anchor on the occupation mean.
        let anchor_raw =
            (ln_base + person.systematic_ln + 0.5 * config.idiosyncratic_sigma.powi(2)).exp();
        let anchor = map.apply(anchor_raw);

        let identity = assemble_identity(person, stated, config, &mut people_rng)?;
        generate_sources_for(
            &identity_id,
            person,
            true_dollars,
            anchor,
            config,
            &mut sources_rng,
            &mut state,
        );
        let example = LabeledExample {
            id: identity_id,
            identity,
            true_income,
        };
        if is_train {
            train.push(example);
        } else {
            test.push(example);
        }
    }

    // Distractor records: unrelated people and postings mixed into the corpus.
    let n_distractors = (config.distractor_rate * total as f64).round() as usize;
    for _ in 0..n_distractors {
        generate_distractor(config, &mut sources_rng, &mut state);
    }

    // Negative labels: one random record and one same-title record per
    // identity. Positives were recorded during source generation.
    let all_ids: Vec<String> = state.corpus.records.iter().map(|r| r.id.clone()).collect();
    let positive_set: std::collections::BTreeSet<(&str, &str)> = state
        .match_labels
        .iter()
        .map(|l| (l.identity_id.as_str(), l.record_id.as_str()))
        .collect();
    let mut negatives = Vec::new();
    for example in train.iter().chain(test.iter()) {
        if all_ids.is_empty() {
            break;
        }
        let random_id = labels_rng.choose(&all_ids).clone();
        if !positive_set.contains(&(example.id.as_str(), random_id.as_str())) {
            negatives.push(MatchLabel {
                identity_id: example.id.clone(),
                record_id: random_id,
                label: false,
            });
        }
        let canonical_title = aliases.canonicalize(&example.identity.job_title, AliasKind::Title);
        if let Some(candidates) = state.by_title.get(&key_normalize(&canonical_title)) {
            let pick = labels_rng.choose(candidates).clone();
            if !positive_set.contains(&(example.id.as_str(), pick.as_str())) {
                negatives.push(MatchLabel {
                    identity_id: example.id.clone(),
                    record_id: pick,
                    label: false,
                });
            }
        }
    }
    state.match_labels.extend(negatives);
    // Interleave positives and negatives so prefix samples are balanced.
    labels_rng.shuffle(&mut state.match_labels);

    // Bundled external text corpus (titles/employers with incomes).
    let mut external_text = Vec::with_capacity(config.external_rows);
    for _ in 0..config.external_rows {
        let person = draw_person(&mut external_rng, config);
        let income = Money::from_dollars_f64(raw_income(&person));
        external_text.push(ExternalTextRow {
            job_title: defaults::TITLES[person.title_idx].name.to_string(),
            employer: defaults::EMPLOYERS[person.employer_idx].name.to_string(),
            income,
        });
    }

    Ok(SynthOutput {
        train,
        test,
        corpus: state.corpus,
        match_labels: state.match_labels,
        external_text,
    })
}

fn assemble_identity(
    person: &DrawnPerson,
    stated: Money,
    config: &SynthConfig,
    rng: &mut Rng,
) -> Result<Identity> {
    let title_entry = &defaults::TITLES[person.title_idx];
    let employer_entry = &defaults::EMPLOYERS[person.employer_idx];
    let state = &defaults::STATES[person.state_idx];
    let (city, zip) = state.cities[person.city_idx];

    let job_title = if !title_entry.aliases.is_empty() && rng.chance(config.alias_noise) {
        rng.choose(title_entry.aliases).to_string()
    } else {
        title_entry.name.to_string()
    };
    let employer = if !employer_entry.aliases.is_empty() && rng.chance(config.alias_noise) {
        rng.choose(employer_entry.aliases).to_string()
    } else {
        employer_entry.name.to_string()
    };

    Identity::new(
        person.name.clone(),
        Address {
            street: Some(person.street.clone()),
            city: Some(city.to_string()),
            county: None,
            state: Some(state.code.to_string()),
            zip: Some(zip.to_string()),
            country: Some("US".to_string()),
        },
        Some(person.dob),
        employer,
        job_title,
        Some(stated),
    )
}

fn generate_sources_for(
    identity_id: &str,
    person: &DrawnPerson,
    true_dollars: f64,
    anchor: f64,
    config: &SynthConfig,
    rng: &mut Rng,
    state: &mut GenState,
) {
    let title = defaults::TITLES[person.title_idx].name;
    let employer = &defaults::EMPLOYERS[person.employer_idx];
    let state_entry = &defaults::STATES[person.state_idx];
    let (city, zip) = state_entry.cities[person.city_idx];
    let industry = employer.industry;

    let k = rng.range_inclusive(config.sources_per_identity.0, config.sources_per_identity.1);
    let mut remaining = k;

    // Government payroll record: only government employers appear in the
    // public payroll databases, and nearly always do.
    if industry == Industry::Government && remaining > 0 && rng.chance(0.95) {
        let salary = true_dollars * (0.02 * rng.normal()).exp();
        let bonus = if rng.chance(0.3) {
            salary * rng.uniform(0.02, 0.12)
        } else {
            0.0
        };
        let noisy_name = gov_name_variant(&person.name, rng);
        let id = state.push_record(
            "gov",
            SourceType::Government,
            Payload::Government {
                name: noisy_name,
                salary: format_dollars(Money::from_dollars_f64(salary)),
                bonus: format_dollars(Money::from_dollars_f64(bonus)),
                agency: employer.name.to_string(),
                location: city.to_uppercase(),
                occupation: title.to_string(),
                year: 2016,
            },
            title,
        );
        state.push_label(identity_id, &id, true);
        remaining -= 1;
    }

    // Industry ratios used when rendering site/snippet documents; mildly
    // industry-dependent so the ratio table has real structure to learn.
    let (low_ratio, high_ratio, total_ratio) = industry_shape(industry);

    while remaining > 0 {
        remaining -= 1;
        if rng.chance(0.65) {
            // salary aggregation site
            let site = if rng.chance(0.5) { "paylevels" } else { "salarystats" };
            let base_median = anchor * (0.05 * rng.normal()).exp();
            let mut base_low = anchor * low_ratio * (0.30 * rng.normal()).exp();
            let mut base_high = anchor * high_ratio * (0.30 * rng.normal()).exp();
            base_low = base_low.min(base_median * 0.98);
            base_high = base_high.max(base_median * 1.02);
            let total_median = base_median * total_ratio * (0.08 * rng.normal()).exp();
            let mut total_low = anchor * low_ratio * total_ratio * (0.32 * rng.normal()).exp();
            let mut total_high = anchor * high_ratio * total_ratio * (0.32 * rng.normal()).exp();
            total_low = total_low.min(total_median * 0.98);
            total_high = total_high.max(total_median * 1.02);

            let mut with_p = |p: f64, v: f64| -> Option<u64> {
                if rng.chance(p) {
                    Some(v.round() as u64)
                } else {
                    None
                }
            };
            let median = with_p(0.95, base_median);
            let low = with_p(0.35, base_low);
            let high = with_p(0.35, base_high);
            let total_median = with_p(0.70, total_median);
            let total_low = with_p(0.30, total_low);
            let total_high = with_p(0.30, total_high);
            let fields = SiteFields {
                median,
                low,
                high,
                total_median,
                total_low,
                total_high,
                employer: employer.name.to_string(),
                title: title.to_string(),
                city: if rng.chance(0.7) { Some(city.to_string()) } else { None },
                state: if rng.chance(0.7) { Some(state_entry.code.to_string()) } else { None },
                zip: if rng.chance(0.4) { Some(zip.to_string()) } else { None },
                country: if rng.chance(0.5) { Some("US".to_string()) } else { None },
                sample_size: rng.range_inclusive(5, 240),
            };
            let id = state.push_record(
                "site",
                SourceType::SalarySite,
                Payload::SalarySite {
                    site: site.to_string(),
                    doc: render_site_doc(site, &fields),
                },
                title,
            );
            state.push_label(identity_id, &id, true);
        } else {
            // free-text snippet
            let text = if rng.chance(0.75) {
                let amount = anchor * (0.07 * rng.normal()).exp();
                format!(
                    "The average {title} salary at {} is {}.",
                    employer.name,
                    format_dollars(Money::from_dollars_f64(amount))
                )
            } else {
                let lo = anchor * low_ratio * (0.15 * rng.normal()).exp();
                let hi = (anchor * high_ratio * (0.15 * rng.normal()).exp()).max(lo * 1.05);
                format!(
                    "{title} salaries at {} range from {} to {}.",
                    employer.name,
                    format_dollars(Money::from_dollars_f64(lo)),
                    format_dollars(Money::from_dollars_f64(hi))
                )
            };
            let url = format!(
                "https://salary-search.test/{}",
                key_normalize(title).replace(' ', "-")
            );
            let id = state.push_record(
                "snip",
                SourceType::Snippet,
                Payload::Snippet { text, url },
                title,
            );
            state.push_label(identity_id, &id, true);
        }
    }
}

/// Middle-name presentation noise on government rows: sometimes the database
/// stores an initial, sometimes no middle name at all.
fn gov_name_variant(name: &PersonName, rng: &mut Rng) -> String {
    let middle = match &name.middle {
        Some(m) if rng.chance(0.30) => Some(m[..1].to_string()),
        Some(_) if rng.chance(0.15) => None,
        Some(m) => Some(m.clone()),
        None => None,
    };
    match middle {
        Some(m) => format!("{} {} {}", name.first, m, name.last),
        None => format!("{} {}", name.first, name.last),
    }
}

fn industry_shape(industry: Industry) -> (f64, f64, f64) {
    // (low/median, high/median, total/base) rendering ratios per industry;
    // deliberately spread wide so the industry ratio table carries structure
    match industry {
        Industry::Technology => (0.58, 1.75, 1.40),
        Industry::Finance => (0.55, 1.85, 1.45),
        Industry::Government => (0.88, 1.15, 1.06),
        Industry::Healthcare => (0.75, 1.35, 1.12),
        Industry::Manufacturing => (0.68, 1.45, 1.18),
        Industry::Retail => (0.80, 1.25, 1.08),
        Industry::Travel => (0.74, 1.38, 1.12),
        Industry::Energy => (0.64, 1.55, 1.25),
        Industry::Education => (0.85, 1.20, 1.06),
        Industry::Logistics => (0.78, 1.30, 1.10),
        Industry::Media => (0.70, 1.42, 1.15),
        Industry::Construction => (0.72, 1.40, 1.10),
    }
}

struct SiteFields {
    median: Option<u64>,
    low: Option<u64>,
    high: Option<u64>,
    total_median: Option<u64>,
    total_low: Option<u64>,
    total_high: Option<u64>,
    employer: String,
    title: String,
    city: Option<String>,
    state: Option<String>,
    zip: Option<String>,
    country: Option<String>,
    sample_size: u64,
}

fn render_site_doc(site: &str, f: &SiteFields) -> serde_json::Value {
    fn strip_nulls(v: &mut serde_json::Value) {
        if let serde_json::Value::Object(map) = v {
            map.retain(|_, child| !child.is_null());
            for child in map.values_mut() {
                strip_nulls(child);
            }
            map.retain(|_, child| {
                !(child.is_object() && child.as_object().unwrap().is_empty())
            });
        }
    }
    let num = |v: &Option<u64>| match v {
        Some(x) => json!(x),
        None => serde_json::Value::Null,
    };
    let mut doc = match site {
        "paylevels" => json!({
            "position": {
                "title": f.title,
                "employer": f.employer,
                "location": {
                    "city": f.city,
                    "state": f.state,
                    "zip": f.zip,
                    "country": f.country,
                }
            },
            "compensation": {
                "base_salary": {"mean": num(&f.median), "min": num(&f.low), "max": num(&f.high)},
                "total_compensation": {
                    "mean": num(&f.total_median),
                    "min": num(&f.total_low),
                    "max": num(&f.total_high)
                }
            },
            "sample_size": f.sample_size,
        }),
        _ => json!({
            "job": {
                "name": f.title,
                "company": f.employer,
                "city": f.city,
                "state": f.state,
                "zip": f.zip,
                "country": f.country,
            },
            "pay": {
                "base": {"avg": num(&f.median), "p10": num(&f.low), "p90": num(&f.high)},
                "total": {
                    "avg": num(&f.total_median),
                    "p10": num(&f.total_low),
                    "p90": num(&f.total_high)
                }
            },
            "reports": f.sample_size,
        }),
    };
    strip_nulls(&mut doc);
    doc
}

fn generate_distractor(config: &SynthConfig, rng: &mut Rng, state: &mut GenState) {
    let person = draw_person(rng, config);
    let title = defaults::TITLES[person.title_idx].name;
    let employer = &defaults::EMPLOYERS[person.employer_idx];
    let state_entry = &defaults::STATES[person.state_idx];
    let (city, _zip) = state_entry.cities[person.city_idx];
    let ln_base = config.income_mean.as_dollars_f64().ln();
    let income = (ln_base + person.systematic_ln + person.residual_ln).exp();

    match rng.below(3) {
        0 if employer.industry == Industry::Government => {
            state.push_record(
                "gov",
                SourceType::Government,
                Payload::Government {
                    name: gov_name_variant(&person.name, rng),
                    salary: format_dollars(Money::from_dollars_f64(income)),
                    bonus: format_dollars(Money::ZERO),
                    agency: employer.name.to_string(),
                    location: city.to_uppercase(),
                    occupation: title.to_string(),
                    year: 2016,
                },
                title,
            );
        }
        1 => {
            // hiring-style snippet with no salary content: exercises the
            // discard path end to end
            let text = format!(
                "We are hiring! {} is looking for a {title} in {city}.",
                employer.name
            );
            let url = "https://jobs.example.test/post".to_string();
            state.push_record("snip", SourceType::Snippet, Payload::Snippet { text, url }, title);
        }
        _ => {
            let amount = income * (0.10 * rng.normal()).exp();
            let text = format!(
                "The average {title} salary at {} is {}.",
                employer.name,
                format_dollars(Money::from_dollars_f64(amount))
            );
            let url = "https://salary-search.test/generic".to_string();
            state.push_record("snip", SourceType::Snippet, Payload::Snippet { text, url }, title);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(seed: u64) -> SynthConfig {
        SynthConfig {
            n_rows: 60,
            test_rows: 20,
            external_rows: 50,
            seed,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let a = generate_synthetic(&small_config(7)).unwrap();
        let b = generate_synthetic(&small_config(7)).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.test, b.test);
        assert_eq!(a.corpus.records, b.corpus.records);
        assert_eq!(a.match_labels, b.match_labels);
        assert_eq!(a.external_text, b.external_text);
    }

    #[test]
    fn different_seeds_differ() {
        let a = generate_synthetic(&small_config(7)).unwrap();
        let b = generate_synthetic(&small_config(8)).unwrap();
        assert_ne!(a.train, b.train);
    }

    #[test]
    fn zero_noise_means_truthful_statements() {
        let config = SynthConfig {
            alias_noise: 0.0,
            income_inflation_rate: 0.0,
            ..small_config(11)
        };
        let out = generate_synthetic(&config).unwrap();
        for ex in out.train.iter().chain(out.test.iter()) {
            assert_eq!(ex.identity.stated_income, Some(ex.true_income), "{}", ex.id);
        }
    }

    #[test]
    fn inflated_fraction_is_roughly_the_configured_rate() {
        let config = SynthConfig {
            n_rows: 800,
            test_rows: 0,
            ..small_config(13)
        };
        let out = generate_synthetic(&config).unwrap();
        let inflated = out
            .train
            .iter()
            .filter(|ex| ex.identity.stated_income != Some(ex.true_income))
            .count();
        let rate = inflated as f64 / out.train.len() as f64;
        assert!((rate - 0.25).abs() < 0.06, "rate {rate}");
    }

    #[test]
    fn every_identity_has_a_coreferent_record() {
        let out = generate_synthetic(&small_config(17)).unwrap();
        let mut positives: std::collections::BTreeSet<&str> = Default::default();
        for l in &out.match_labels {
            if l.label {
                positives.insert(l.identity_id.as_str());
            }
        }
        for ex in out.train.iter().chain(out.test.iter()) {
            assert!(positives.contains(ex.id.as_str()), "{} has no source", ex.id);
        }
    }

    #[test]
    fn exact_moments_hit_targets() {
        let config = SynthConfig {
            n_rows: 500,
            test_rows: 100,
            ..small_config(19)
        };
        let out = generate_synthetic(&config).unwrap();
        let incomes: Vec<Money> = out.train.iter().map(|e| e.true_income).collect();
        let stats = crate::metrics::dataset_stats(&incomes).unwrap();
        let mean = stats.mean.as_dollars_f64();
        let std = stats.stddev.as_dollars_f64();
        assert!((mean - 77_571.760).abs() / 77_571.760 < 1e-4, "mean {mean}");
        assert!((std - 57_979.323).abs() / 57_979.323 < 1e-4, "std {std}");
    }

    #[test]
    fn record_ids_are_unique() {
        let out = generate_synthetic(&small_config(23)).unwrap();
        let mut ids: Vec<&str> = out.corpus.records.iter().map(|r| r.id.as_str()).collect();
        let before = ids.len();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), before);
    }

    #[test]
    fn format_dollars_inserts_separators() {
        assert_eq!(format_dollars(Money::from_dollars(73_482)), "$73,482");
        assert_eq!(format_dollars(Money::from_dollars(1_000_000)), "$1,000,000");
        assert_eq!(format_dollars(Money::from_dollars(950)), "$950");
        assert_eq!(format_dollars(Money::ZERO), "$0");
    }

    #[test]
    fn rejects_invalid_config() {
        let mut c = small_config(1);
        c.alias_noise = 1.5;
        assert!(generate_synthetic(&c).is_err());
        let mut c2 = small_config(1);
        c2.inflation_factor_range = (0.5, 2.0);
        assert!(generate_synthetic(&c2).is_err());
        let mut c3 = small_config(1);
        c3.n_rows = 0;
        assert!(generate_synthetic(&c3).is_err());
    }
}
