use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Pow, Signed, Zero};

use super::{Dyadic, Rational};
use crate::error::{Error, Result};

fn pow10(k: u32) -> BigInt {
    BigInt::from(10u32).pow(k)
}

fn scale10(x: &Rational, k: i64) -> Rational {
    if k >= 0 {
        x * Rational::from_integer(pow10(k as u32))
    } else {
        x / Rational::from_integer(pow10((-k) as u32))
    }
}

/// Round-half-even of a nonnegative rational to an integer.
fn round_integer(x: &Rational) -> BigInt {
    let (q, r) = x.numer().div_rem(x.denom());
    let twice: BigInt = &r * 2;
    match twice.cmp(x.denom()) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1
            }
        }
    }
}

/// Decimal scientific notation with `digits` significant digits, e.g.
/// `3.7500e-1`. Exact: the decimal digits come from big-integer arithmetic,
/// so values far outside the f64 range print correctly.
pub fn format_rational_sci(x: &Rational, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_zero() {
        return format!("{:.*}e0", digits - 1, 0.0);
    }
    let neg = x.is_negative();
    let a = x.abs();
    let log2 = Dyadic::new(a.numer().clone(), 0).log2_abs() - Dyadic::new(a.denom().clone(), 0).log2_abs();
    let mut d = (log2 * std::f64::consts::LOG10_2).floor() as i64;
    let lower = pow10(digits as u32 - 1);
    let upper = pow10(digits as u32);
    let n = loop {
        let n = round_integer(&scale10(&a, digits as i64 - 1 - d));
        if n >= upper {
            d += 1;
        } else if n < lower {
            d -= 1;
        } else {
            break n;
        }
    };
    let text = n.to_string();
    let (head, tail) = text.split_at(1);
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{d}")
    } else {
        format!("{sign}{head}.{tail}e{d}")
    }
}

/// Parses `a/b`, integers, decimals and decimal exponents (`0.22`, `1e-3`,
/// `-2.5E+2`) into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_rational(num)?;
        let den = parse_rational(den)?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(num / den);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let value = scale10(&Rational::from_integer(n), exponent - frac_part.len() as i64);
    Ok(if neg { -value } else { value })
}

/// Decimal with `sig` significant digits in positional notation, the
/// convention used for CSV output. Zero prints as `0.000000000`.
pub fn format_significant(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.*}", sig.saturating_sub(1), if x.is_finite() { 0.0 } else { x });
    }
    let mag = x.abs().log10().floor() as i64;
    let decimals = (sig as i64 - 1 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}
