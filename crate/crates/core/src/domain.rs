//! Input identity types.
//!
//! [`Identity`] mirrors one application row: personally identifiable fields,
//! employment fields, and the applicant's stated income. Model feature
//! builders never see an `Identity`; they accept [`RedactedIdentity`], a
//! projection that drops name, date of birth, street and zip by construction,
//! so personal identifiers can only influence record lookup and matching.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::money::Money;

/// The fifty US state postal codes, in the fixed slot order used by the
/// one-hot location encoder.
pub const STATE_SLOTS: [&str; 50] = [
    "AL", "AK", "AZ", "AR", "CA", "CO", "CT", "DE", "FL", "GA", "HI", "ID", "IL", "IN", "IA",
    "KS", "KY", "LA", "ME", "MD", "MA", "MI", "MN", "MS", "MO", "MT", "NE", "NV", "NH", "NJ",
    "NM", "NY", "NC", "ND", "OH", "OK", "OR", "PA", "RI", "SC", "SD", "TN", "TX", "UT", "VT",
    "VA", "WA", "WV", "WI", "WY",
];

/// Additional recognized codes that are valid input but have no one-hot slot.
const EXTRA_STATE_CODES: [&str; 9] = ["DC", "PR", "VI", "GU", "AS", "MP", "AA", "AE", "AP"];

pub fn is_recognized_state(code: &str) -> bool {
    STATE_SLOTS.contains(&code) || EXTRA_STATE_CODES.contains(&code)
}

/// Slot index for the one-hot state encoding, if the code is one of the 50.
pub fn state_slot(code: &str) -> Option<usize> {
    STATE_SLOTS.iter().position(|s| *s == code)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct PersonName {
    pub first: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub middle: Option<String>,
    pub last: String,
}

impl PersonName {
    pub fn new(first: impl Into<String>, middle: Option<&str>, last: impl Into<String>) -> Self {
        PersonName {
            first: first.into(),
            middle: middle.map(str::to_string),
            last: last.into(),
        }
    }

    /// Parse a display-form name: first token is the given name, last token
    /// the family name, anything in between the middle name.
    pub fn parse(raw: &str) -> Option<PersonName> {
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        match tokens.as_slice() {
            [] => None,
            [single] => Some(PersonName::new(*single, None, "")),
            [first, last] => Some(PersonName::new(*first, None, *last)),
            [first, middle @ .., last] => {
                Some(PersonName::new(*first, Some(&middle.join(" ")), *last))
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.first.trim().is_empty() && self.last.trim().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Address {
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
}

/// One income-verification input row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Identity {
    pub name: PersonName,
    pub address: Address,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dob: Option<NaiveDate>,
    pub employer: String,
    pub job_title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stated_income: Option<Money>,
}

impl Identity {
    /// Validating constructor. Employment fields must be non-empty, a stated
    /// income must be positive, and a state code must be recognized.
    pub fn new(
        name: PersonName,
        address: Address,
        dob: Option<NaiveDate>,
        employer: impl Into<String>,
        job_title: impl Into<String>,
        stated_income: Option<Money>,
    ) -> Result<Identity> {
        let employer = employer.into();
        let job_title = job_title.into();
        if employer.trim().is_empty() {
            return Err(Error::InvalidInput("employer must be non-empty".into()));
        }
        if job_title.trim().is_empty() {
            return Err(Error::InvalidInput("job title must be non-empty".into()));
        }
        if let Some(income) = stated_income {
            if income.is_zero() {
                return Err(Error::InvalidInput(
                    "stated income, when present, must be positive".into(),
                ));
            }
        }
        if let Some(code) = address.state.as_deref() {
            if !is_recognized_state(code) {
                return Err(Error::InvalidInput(format!(
                    "unrecognized state code {code:?}"
                )));
            }
        }
        Ok(Identity {
            name,
            address,
            dob,
            employer,
            job_title,
            stated_income,
        })
    }

    /// Project away everything personally identifying. This is the only
    /// identity view the feature builders accept.
    pub fn redact(&self) -> RedactedIdentity {
        RedactedIdentity {
            employer: self.employer.clone(),
            job_title: self.job_title.clone(),
            city: self.address.city.clone(),
            state: self.address.state.clone(),
        }
    }
}

/// Identity projection with no name, dob, street, or zip field: the type
/// system, not discipline, keeps those out of model features.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedactedIdentity {
    pub employer: String,
    pub job_title: String,
    pub city: Option<String>,
    pub state: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn name() -> PersonName {
        PersonName::new("Ada", None, "Lovelace")
    }

    #[test]
    fn rejects_empty_employment_fields() {
        assert!(Identity::new(name(), Address::default(), None, "", "Engineer", None).is_err());
        assert!(Identity::new(name(), Address::default(), None, "Acme", "  ", None).is_err());
    }

    #[test]
    fn rejects_zero_stated_income() {
        let err = Identity::new(
            name(),
            Address::default(),
            None,
            "Acme",
            "Engineer",
            Some(Money::ZERO),
        );
        assert!(err.is_err());
    }

    #[test]
    fn rejects_unknown_state_code() {
        let addr = Address {
            state: Some("ZZ".into()),
            ..Address::default()
        };
        assert!(Identity::new(name(), addr, None, "Acme", "Engineer", None).is_err());
    }

    #[test]
    fn accepts_territory_codes_without_slot() {
        let addr = Address {
            state: Some("PR".into()),
            ..Address::default()
        };
        assert!(Identity::new(name(), addr, None, "Acme", "Engineer", None).is_ok());
        assert_eq!(state_slot("PR"), None);
        assert_eq!(state_slot("CA"), Some(4));
    }

    #[test]
    fn redaction_strips_identifying_fields() {
        let addr = Address {
            street: Some("1 Main St".into()),
            city: Some("Springfield".into()),
            county: Some("Clark".into()),
            state: Some("OH".into()),
            zip: Some("45501".into()),
            country: Some("US".into()),
        };
        let id = Identity::new(
            name(),
            addr,
            NaiveDate::from_ymd_opt(1961, 8, 4),
            "Acme",
            "Engineer",
            Some(Money::from_dollars(90_000)),
        )
        .unwrap();
        let red = id.redact();
        // RedactedIdentity has no name/dob/street/zip fields at all; check the
        // retained projection is faithful.
        assert_eq!(red.employer, "Acme");
        assert_eq!(red.job_title, "Engineer");
        assert_eq!(red.city.as_deref(), Some("Springfield"));
        assert_eq!(red.state.as_deref(), Some("OH"));
    }

    #[test]
    fn name_parse_splits_middle_tokens() {
        let n = PersonName::parse("James Ryan Smith").unwrap();
        assert_eq!(n.first, "James");
        assert_eq!(n.middle.as_deref(), Some("Ryan"));
        assert_eq!(n.last, "Smith");

        let n2 = PersonName::parse("Mary Jo Ann Quinn").unwrap();
        assert_eq!(n2.middle.as_deref(), Some("Jo Ann"));
        assert!(PersonName::parse("   ").is_none());
    }
}
