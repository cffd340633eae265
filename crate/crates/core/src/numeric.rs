//! Exact rational helpers: parsing, perfect squares, and correctly rounded
//! decimal rendering.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Significant digits used for every decimal rendering.
pub const SIGNIFICANT_DIGITS: usize = 15;

/// Parses `3`, `-1/2`, `+0.25`, `1e-3` or `2.5E2` into an exact rational.
pub fn parse_rational(input: &str) -> Result<BigRational> {
    let bad = || Error::Parse {
        what: "rational",
        input: input.to_string(),
    };
    let s = input.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = parse_signed_int(num).ok_or_else(bad)?;
        let d: BigInt = den.trim().parse::<BigInt>().map_err(|_| bad())?;
        if d.is_zero() || den.trim().starts_with(['+', '-']) {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let n: BigInt = all_digits.parse().map_err(|_| bad())?;
    let scale = exponent - i32::try_from(frac_part.len()).map_err(|_| bad())?;
    let mut value = BigRational::from_integer(n);
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= Pow::pow(&ten, scale as u32);
    } else {
        value /= Pow::pow(&ten, (-scale) as u32);
    }
    Ok(if negative { -value } else { value })
}

fn parse_signed_int(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let body = s.strip_prefix('+').unwrap_or(s);
    if body.is_empty() || body.starts_with('+') {
        return None;
    }
    body.parse().ok()
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = integer_sqrt_exact(r.numer())?;
    let d = integer_sqrt_exact(r.denom())?;
    Some(BigRational::new(n, d))
}

fn integer_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    let root = n.sqrt();
    (&root * &root == *n).then_some(root)
}

/// `a/b` in lowest terms, `a/b` when `b = 1` printed as an integer.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_sign(r: &BigRational) -> Sign {
    if r.is_positive() {
        Sign::Plus
    } else if r.is_negative() {
        Sign::Minus
    } else {
        Sign::NoSign
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Renders a rational to [`SIGNIFICANT_DIGITS`] correctly rounded digits.
pub fn format_rational_decimal(r: &BigRational) -> String {
    format_significant(rational_sign(r), rational_to_f64(r).abs(), |q| {
        r.abs().cmp(q)
    })
}

/// Correctly rounded decimal rendering of an exact positive magnitude `x`,
/// known through `approx ~ x` and an exact comparator `cmp(q) = x.cmp(q)`.
/// Ties round to even.
pub(crate) fn format_significant(
    sign: Sign,
    approx: f64,
    cmp: impl Fn(&BigRational) -> Ordering,
) -> String {
    if sign == Sign::NoSign {
        return "0".to_string();
    }
    let ten = BigInt::from(10);
    let pow10 = |e: i32| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(Pow::pow(&ten, e as u32))
        } else {
            BigRational::new(BigInt::one(), Pow::pow(&ten, (-e) as u32))
        }
    };

    // 10^e <= x < 10^(e+1)
    let mut e = if approx > 0.0 && approx.is_finite() {
        approx.log10().floor() as i32
    } else {
        0
    };
    while cmp(&pow10(e)) == Ordering::Less {
        e -= 1;
    }
    while cmp(&pow10(e + 1)) != Ordering::Less {
        e += 1;
    }

    let digits = SIGNIFICANT_DIGITS as i32;
    let shift = digits - 1 - e;
    let unit = pow10(-shift);
    let lower_bound = Pow::pow(&ten, (digits - 1) as u32);
    let mut n = BigInt::from((approx * 10f64.powi(shift)).floor() as i128);
    if n < lower_bound {
        n = lower_bound.clone();
    }
    let at = |k: &BigInt| BigRational::from_integer(k.clone()) * &unit;
    while cmp(&at(&n)) == Ordering::Less {
        n -= 1;
    }
    while cmp(&at(&(&n + 1))) != Ordering::Less {
        n += 1;
    }
    let midpoint =
        (BigRational::from_integer(n.clone()) + BigRational::new(1.into(), 2.into())) * &unit;
    let round_up = match cmp(&midpoint) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => n.is_odd(),
    };
    if round_up {
        n += 1;
    }
    if n == Pow::pow(&ten, digits as u32) {
        n = lower_bound;
        e += 1;
    }

    let body = n.to_string();
    let mut out = String::new();
    if sign == Sign::Minus {
        out.push('-');
    }
    if (-5..15).contains(&e) {
        if e >= 0 {
            let split = (e + 1) as usize;
            out.push_str(&body[..split]);
            let frac = body[split..].trim_end_matches('0');
            if !frac.is_empty() {
                out.push('.');
                out.push_str(frac);
            }
        } else {
            out.push_str("0.");
            out.push_str(&"0".repeat((-e - 1) as usize));
            out.push_str(body.trim_end_matches('0'));
        }
    } else {
        out.push_str(&body[..1]);
        let frac = body[1..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
        out.push_str(&format!("e{e}"));
    }
    out
}
