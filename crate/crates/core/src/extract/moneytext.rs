//! Money-amount parsing for extractor text.

use crate::money::Money;

/// Parse a single dollar amount: `$73,482`, `73482`, `1,000,000`, `45.00`.
/// Returns `None` for anything that is not one plain amount (ranges included;
/// see [`parse_money_range`]).
pub fn parse_money_text(text: &str) -> Option<Money> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return None;
    }
    let mut rest = trimmed;
    if let Some(stripped) = rest.strip_prefix('$') {
        rest = stripped.trim_start();
    }
    if rest.is_empty() {
        return None;
    }
    let mut integer_part: u64 = 0;
    let mut cents: u64 = 0;
    let mut saw_digit = false;
    let mut chars = rest.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '0'..='9' => {
                saw_digit = true;
                integer_part = integer_part
                    .checked_mul(10)?
                    .checked_add(c as u64 - '0' as u64)?;
                chars.next();
            }
            ',' => {
                // thousands separator; must sit between digits
                if !saw_digit {
                    return None;
                }
                chars.next();
                if !matches!(chars.peek(), Some('0'..='9')) {
                    return None;
                }
            }
            '.' => {
                chars.next();
                let mut frac = String::new();
                for fc in chars.by_ref() {
                    if fc.is_ascii_digit() {
                        frac.push(fc);
                    } else {
                        return None;
                    }
                }
                if frac.is_empty() || frac.len() > 2 {
                    return None;
                }
                let parsed: u64 = frac.parse().ok()?;
                cents = if frac.len() == 1 { parsed * 10 } else { parsed };
                break;
            }
            _ => return None,
        }
    }
    if !saw_digit {
        return None;
    }
    integer_part
        .checked_mul(100)?
        .checked_add(cents)
        .map(Money::from_cents)
}

/// Parse a two-endpoint range: `90,000 - 234,000`, `$90,000 to $234,000`,
/// `from 90,000 to 234,000`. Returns `(low, high)` as written.
pub fn parse_money_range(text: &str) -> Option<(Money, Money)> {
    let trimmed = text.trim();
    let body = trimmed
        .strip_prefix("from ")
        .or_else(|| trimmed.strip_prefix("From "))
        .unwrap_or(trimmed);
    for separator in [" - ", "-", " to ", " TO ", " To ", "\u{2013}"] {
        if let Some((left, right)) = body.split_once(separator) {
            if let (Some(low), Some(high)) = (parse_money_text(left), parse_money_text(right)) {
                return Some((low, high));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_published_forms() {
        assert_eq!(parse_money_text("$73,482"), Some(Money::from_dollars(73_482)));
        assert_eq!(parse_money_text("73482"), Some(Money::from_dollars(73_482)));
        assert_eq!(
            parse_money_text("1,000,000"),
            Some(Money::from_dollars(1_000_000))
        );
        assert_eq!(parse_money_text("$0"), Some(Money::ZERO));
        assert_eq!(parse_money_text("45.00"), Some(Money::from_dollars(45)));
        assert_eq!(parse_money_text("45.5"), Some(Money::from_cents(4550)));
    }

    #[test]
    fn rejects_non_monetary_text() {
        assert_eq!(parse_money_text("salary information"), None);
        assert_eq!(parse_money_text(""), None);
        assert_eq!(parse_money_text("N/A"), None);
        assert_eq!(parse_money_text("$"), None);
        assert_eq!(parse_money_text("12abc"), None);
        assert_eq!(parse_money_text("1,,0"), None);
        assert_eq!(parse_money_text("1."), None);
        assert_eq!(parse_money_text("1.234"), None);
    }

    #[test]
    fn single_parse_rejects_ranges() {
        assert_eq!(parse_money_text("90,000 - 234,000"), None);
    }

    #[test]
    fn range_variants() {
        let expected = Some((Money::from_dollars(90_000), Money::from_dollars(234_000)));
        assert_eq!(parse_money_range("90,000 - 234,000"), expected);
        assert_eq!(parse_money_range("$90,000 to $234,000"), expected);
        assert_eq!(parse_money_range("from 90,000 to 234,000"), expected);
        assert_eq!(parse_money_range("90000-234000"), expected);
        assert_eq!(parse_money_range("just words"), None);
    }
}
