//! Text form of exact rationals: decimal (`-1.25`, `3e-2`) or `p/q`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::geometry::Rational;

use super::ModelError;

pub fn parse_rational(text: &str) -> Result<Rational, ModelError> {
    let s = text.trim();
    let bad = || ModelError::NonNumeric(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all.parse::<BigInt>().map_err(|_| bad())?);
    let shift = exponent - frac_part.len() as i64;
    let ten = Rational::from_integer(BigInt::from(10));
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    Ok(if negative { -value } else { value })
}

/// Canonical text: terminating decimals are written as decimals, everything
/// else as `p/q`. Distinct rationals never share a representation.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        return q.numer().to_string();
    }
    let den = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0u32, 0u32);
    let mut rest = den.clone();
    while rest.is_even() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("{}/{}", q.numer(), q.denom());
    }
    let digits = twos.max(fives) as usize;
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = q.numer() * &scale / &den;
    let neg = scaled.is_negative();
    let mut body = scaled.abs().to_string();
    if body.len() <= digits {
        body = format!("{}{}", "0".repeat(digits + 1 - body.len()), body);
    }
    let split = body.len() - digits;
    format!("{}{}.{}", if neg { "-" } else { "" }, &body[..split], &body[split..])
}
