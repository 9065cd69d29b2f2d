use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An annual USD amount, stored as whole cents.
///
/// Stored integrally so ingestion is exact; statistics and model math convert
/// to `f64` dollars at the boundary. All arithmetic is checked: overflow is a
/// reported error, never silent wraparound.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct Money {
    cents: u64,
}

impl Money {
    pub const ZERO: Money = Money { cents: 0 };

    pub fn from_cents(cents: u64) -> Self {
        Money { cents }
    }

    pub fn from_dollars(dollars: u64) -> Self {
        Money {
            cents: dollars
                .checked_mul(100)
                .expect("dollar amount overflows cents"),
        }
    }

    /// Round a floating-point dollar amount to the nearest cent, clamping
    /// negatives to zero (incomes cannot be negative).
    pub fn from_dollars_f64(dollars: f64) -> Self {
        if !dollars.is_finite() || dollars <= 0.0 {
            return Money::ZERO;
        }
        Money {
            cents: (dollars * 100.0).round() as u64,
        }
    }

    pub fn cents(self) -> u64 {
        self.cents
    }

    pub fn as_dollars_f64(self) -> f64 {
        self.cents as f64 / 100.0
    }

    pub fn is_zero(self) -> bool {
        self.cents == 0
    }

    pub fn checked_add(self, other: Money) -> Result<Money> {
        self.cents
            .checked_add(other.cents)
            .map(Money::from_cents)
            .ok_or_else(|| Error::Contract(format!("money addition overflow: {self} + {other}")))
    }

    pub fn checked_sub(self, other: Money) -> Result<Money> {
        self.cents
            .checked_sub(other.cents)
            .map(Money::from_cents)
            .ok_or_else(|| Error::Contract(format!("money subtraction underflow: {self} - {other}")))
    }

    /// |a - b| without sign concerns.
    pub fn abs_diff(self, other: Money) -> Money {
        Money::from_cents(self.cents.abs_diff(other.cents))
    }

    /// Multiply by an integer factor (e.g. hours per year), checked.
    pub fn checked_mul(self, factor: u64) -> Result<Money> {
        self.cents
            .checked_mul(factor)
            .map(Money::from_cents)
            .ok_or_else(|| Error::Contract(format!("money multiplication overflow: {self} x {factor}")))
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "${}.{:02}", self.cents / 100, self.cents % 100)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_formats_cents() {
        assert_eq!(Money::from_cents(7348200).to_string(), "$73482.00");
        assert_eq!(Money::from_cents(105).to_string(), "$1.05");
        assert_eq!(Money::ZERO.to_string(), "$0.00");
    }

    #[test]
    fn rounding_from_f64() {
        assert_eq!(Money::from_dollars_f64(1.006).cents(), 101);
        assert_eq!(Money::from_dollars_f64(1.004).cents(), 100);
        assert_eq!(Money::from_dollars_f64(-5.0), Money::ZERO);
        assert_eq!(Money::from_dollars_f64(f64::NAN), Money::ZERO);
    }

    #[test]
    fn checked_arithmetic_reports_overflow() {
        let max = Money::from_cents(u64::MAX);
        assert!(max.checked_add(Money::from_cents(1)).is_err());
        assert!(Money::ZERO.checked_sub(Money::from_cents(1)).is_err());
        assert!(max.checked_mul(2).is_err());
    }

    #[test]
    fn abs_diff_is_symmetric() {
        let a = Money::from_dollars(100_000);
        let b = Money::from_dollars(80_000);
        assert_eq!(a.abs_diff(b), b.abs_diff(a));
        assert_eq!(a.abs_diff(b), Money::from_dollars(20_000));
    }
}
