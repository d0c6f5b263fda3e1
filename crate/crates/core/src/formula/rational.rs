use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// Decimal notation when the value has a finite decimal expansion, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut den = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = twos.max(fives);
    let scaled = (r.abs() * Rational::from_integer(BigInt::from(10).pow(digits as u32))).to_integer();
    let text = format!("{:0>width$}", scaled.to_string(), width = digits + 1);
    let (int_part, frac_part) = text.split_at(text.len() - digits);
    let sign = if r.is_negative() { "-" } else { "" };
    format!("{sign}{int_part}.{frac_part}")
}

/// Parses `12`, `-0.25`, `3/4` or `-3/4`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let value = if let Some((p, q)) = body.split_once('/') {
        let p = parse_decimal(p)?;
        let q = parse_decimal(q)?;
        if q.is_zero() {
            return None;
        }
        p / q
    } else {
        parse_decimal(body)?
    };
    Some(if negative { -value } else { value })
}

fn parse_decimal(text: &str) -> Option<Rational> {
    let (int_part, frac_part) = text.split_once('.').unwrap_or((text, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let denom = BigInt::from(10).pow(frac_part.len() as u32);
    Some(Rational::new(numer, denom))
}
