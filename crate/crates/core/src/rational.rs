//! Exact rational numbers and the numeral grammar used by every document.
//!
//! Numerals are an optional sign followed by either a decimal literal
//! (`"0.7"`, `"-12"`, `".5"`) or a fraction `"p/q"`. Decimals convert
//! exactly: `"0.7"` is `7/10`, never a binary float.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Why a numeral string was rejected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed numeral {text:?}: {reason}")]
pub struct NumeralError {
    pub text: String,
    pub reason: &'static str,
}

fn bad(text: &str, reason: &'static str) -> NumeralError {
    NumeralError {
        text: text.to_string(),
        reason,
    }
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses a numeral string exactly.
pub fn parse(text: &str) -> Result<Rational, NumeralError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(bad(text, "empty"));
    }
    let lower = s.to_ascii_lowercase();
    if lower.contains("inf") || lower.contains("nan") {
        return Err(bad(text, "non-finite"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let num = parse_integer(p.trim()).ok_or_else(|| bad(text, "bad numerator"))?;
        let den = parse_integer(q.trim()).ok_or_else(|| bad(text, "bad denominator"))?;
        if den.is_zero() {
            return Err(bad(text, "zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    parse_decimal(s).ok_or_else(|| bad(text, "expected decimal or p/q"))
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let (neg, digits) = split_sign(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let v: BigInt = digits.parse().ok()?;
    Some(if neg { -v } else { v })
}

fn split_sign(s: &str) -> (bool, &str) {
    match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    }
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (neg, body) = split_sign(s);
    let (whole, frac) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let num: BigInt = digits.parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let v = Rational::new(num, den);
    Some(if neg { -v } else { v })
}

/// Canonical `"p/q"` (or `"p"` for integers) rendering.
pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal approximation for human readability only.
pub fn approx(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Displays a rational as `p/q`.
pub struct Show<'a>(pub &'a Rational);

impl fmt::Display for Show<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format(self.0))
    }
}

/// Least common multiple of the denominators of `values` (1 when empty).
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

pub fn is_integral(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

/// serde adapter: rationals travel as numeral strings.
pub mod serde_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = NumeralInput::deserialize(d)?;
        s.into_rational().map_err(serde::de::Error::custom)
    }

    /// Numerals may arrive as JSON strings or plain integer literals.
    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum NumeralInput {
        Text(String),
        Int(i64),
    }

    impl NumeralInput {
        pub(crate) fn into_rational(self) -> Result<Rational, super::NumeralError> {
            match self {
                NumeralInput::Text(t) => super::parse(&t),
                NumeralInput::Int(i) => Ok(super::int(i)),
            }
        }
    }
}

/// serde adapter for vectors of numerals.
pub mod serde_vec {
    use super::serde_str::NumeralInput;
    use super::Rational;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&super::format(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<NumeralInput>::deserialize(d)?;
        raw.into_iter()
            .map(|n| n.into_rational().map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse("0.7").unwrap(), ratio(7, 10));
        assert_eq!(parse("-12").unwrap(), int(-12));
        assert_eq!(parse("+.25").unwrap(), ratio(1, 4));
        assert_eq!(parse("3.").unwrap(), int(3));
    }

    #[test]
    fn fractions_reduce() {
        assert_eq!(parse("-8/10").unwrap(), ratio(-4, 5));
        assert_eq!(parse(" 6 / 4 ").unwrap(), ratio(3, 2));
        assert_eq!(format(&parse("27/10").unwrap()), "27/10");
        assert_eq!(format(&parse("4/2").unwrap()), "2");
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1/0", "inf", "NaN", "1e5", "1.2.3", "-", "."] {
            assert!(parse(s).is_err(), "{s:?} should be rejected");
        }
    }

    #[test]
    fn lcm_of_denominators() {
        let v = [ratio(1, 4), ratio(5, 6), int(3)];
        assert_eq!(denominator_lcm(&v), BigInt::from(12));
    }
}
