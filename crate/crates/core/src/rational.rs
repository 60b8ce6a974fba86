//! Exact rational helpers shared by every module.
//!
//! Values are `num_rational::BigRational`, which is always kept in lowest
//! terms with a positive denominator. Text form is `p/q` or a plain integer;
//! decimal notation is rejected because it invites silent rounding upstream.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{HkError, Result};

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"`, `"-p/q"` or an integer literal.
pub fn parse(literal: &str) -> Result<Rational> {
    let s = literal.trim();
    let bad = |reason| HkError::BadRational { literal: literal.to_string(), reason };
    if s.is_empty() {
        return Err(bad("empty literal"));
    }
    if s.contains(['.', 'e', 'E']) {
        return Err(bad("decimal notation is not exact; use p/q"));
    }
    let lower = s.to_ascii_lowercase();
    if lower.contains("inf") || lower.contains("nan") {
        return Err(bad("non-finite value"));
    }
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad("numerator is not an integer"))?;
    let den = BigInt::from_str(den).map_err(|_| bad("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// `p/q`, or `p` when the value is an integer.
pub fn format(r: &Rational) -> String {
    r.to_string()
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// True if the denominator has no prime factors other than 2 and 5.
pub fn is_terminating_decimal(r: &Rational) -> bool {
    let mut d = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while d.is_even() {
        d /= &two;
    }
    while (&d % &five).is_zero() {
        d /= &five;
    }
    d.is_one()
}

/// Exact decimal expansion of a terminating rational, e.g. `-0.0125`.
pub fn to_exact_decimal(r: &Rational) -> Option<String> {
    if !is_terminating_decimal(r) {
        return None;
    }
    let mut scale = 0usize;
    let mut v = r.abs();
    let ten = int(10);
    while !v.is_integer() {
        v *= &ten;
        scale += 1;
    }
    let digits = v.to_integer().to_string();
    let sign = if r.is_negative() { "-" } else { "" };
    if scale == 0 {
        return Some(format!("{sign}{digits}"));
    }
    let padded = format!("{digits:0>width$}", width = scale + 1);
    let (head, tail) = padded.split_at(padded.len() - scale);
    Some(format!("{sign}{head}.{tail}"))
}

/// Plotting convenience only; never used for decisions.
pub fn approx(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_rational_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|s| parse(s).map_err(serde::de::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse("3/2").unwrap(), frac(3, 2));
        assert_eq!(parse("-6/4").unwrap(), frac(-3, 2));
        assert_eq!(parse(" 7 ").unwrap(), int(7));
        assert_eq!(parse("1/-2").unwrap(), frac(-1, 2));
    }

    #[test]
    fn rejects_inexact_and_malformed() {
        for bad in ["0.5", "1e3", "", "1/0", "x", "inf", "NaN", "1/2/3"] {
            assert!(parse(bad).is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn decimal_expansion() {
        assert_eq!(to_exact_decimal(&frac(-1, 80)).as_deref(), Some("-0.0125"));
        assert_eq!(to_exact_decimal(&frac(399, 100)).as_deref(), Some("3.99"));
        assert_eq!(to_exact_decimal(&int(12)).as_deref(), Some("12"));
        assert_eq!(to_exact_decimal(&frac(1, 3)), None);
    }

    #[test]
    fn format_round_trips() {
        for r in [frac(1, 3), int(-4), frac(-7, 12)] {
            assert_eq!(parse(&format(&r)).unwrap(), r);
        }
    }
}
