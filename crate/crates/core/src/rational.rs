//! Exact rational numbers and their textual form.
//!
//! [`Rational`] is `num_rational::BigRational`, which keeps every value in
//! lowest terms with a positive denominator after each operation.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not an exact rational literal: {literal:?}")]
pub struct ParseRationalError {
    pub literal: String,
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-0.25"`.
///
/// Decimals are read exactly: `"0.99"` is `99/100`. Exponents, `inf` and
/// `nan` are rejected.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError {
        literal: String::from(text),
    };
    let s = text.trim();
    if let Some((p, q)) = s.split_once('/') {
        let numer = parse_integer(p.trim()).ok_or_else(err)?;
        let denom = parse_integer(q.trim()).ok_or_else(err)?;
        if denom.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(numer, denom));
    }
    let (negative, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let (whole, frac) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let mut digits = String::with_capacity(whole.len() + frac.len() + 1);
    digits.push('0');
    digits.push_str(whole);
    digits.push_str(frac);
    let numer: BigInt = digits.parse().map_err(|_| err())?;
    let denom = num_traits::pow(BigInt::from(10u8), frac.len());
    let value = Rational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Lowest-terms rendering: `"p/q"`, or just `"p"` for integers.
pub fn format_rational(value: &Rational) -> String {
    alloc::format!("{}", value)
}

/// Wrapper that renders a rational as a decimal when it is a finite decimal,
/// falling back to `p/q`. Used in human-readable summaries only.
pub struct Decimal<'a>(pub &'a Rational);

impl fmt::Display for Decimal<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let value = self.0;
        let mut denom = value.denom().clone();
        let two = BigInt::from(2u8);
        let five = BigInt::from(5u8);
        let mut twos = 0usize;
        let mut fives = 0usize;
        while (&denom % &two).is_zero() {
            denom /= &two;
            twos += 1;
        }
        while (&denom % &five).is_zero() {
            denom /= &five;
            fives += 1;
        }
        if !denom.is_one() {
            return write!(f, "{}", value);
        }
        let scale = twos.max(fives);
        if scale == 0 {
            return write!(f, "{}", value.numer());
        }
        let scaled = (value * Rational::from_integer(num_traits::pow(BigInt::from(10u8), scale)))
            .to_integer();
        let sign = if scaled.is_negative() { "-" } else { "" };
        let digits = scaled.abs().to_str_radix(10);
        let padded: String = if digits.len() <= scale {
            let mut s: String = core::iter::repeat_n('0', scale + 1 - digits.len()).collect();
            s.push_str(&digits);
            s
        } else {
            digits
        };
        let (w, fr) = padded.split_at(padded.len() - scale);
        write!(f, "{sign}{w}.{fr}")
    }
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

pub fn zeros(len: usize) -> Vec<Rational> {
    alloc::vec![Rational::zero(); len]
}
