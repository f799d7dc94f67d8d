//! Exact rational scalars.
//!
//! Every numeric quantity in the engine is a [`Rat`]: matrix entries,
//! abscissae, perturbation offsets, residue coefficients and the final
//! volume. `BigRational` already keeps values in lowest terms with a
//! positive denominator, so the alias carries the invariants for free.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// Integer-valued rational.
pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// `num / den`, reduced. Panics on a zero denominator.
pub fn frac(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

pub fn factorial_rat(n: usize) -> Rat {
    Rat::from_integer(BigInt::from(factorial(n)))
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator or denominator too large for a direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// `r^e` for a non-negative exponent.
pub fn pow(r: &Rat, e: usize) -> Rat {
    num_traits::pow(r.clone(), e)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseRatError {
    Empty,
    /// A decimal literal was given where only exact rationals are accepted.
    Decimal(String),
    Malformed(String),
    ZeroDenominator(String),
}

impl fmt::Display for ParseRatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseRatError::Empty => write!(f, "empty rational literal"),
            ParseRatError::Decimal(s) => write!(
                f,
                "`{s}` is a decimal literal; inputs must be exact rationals such as \"1/10\" or \"3\" \
                 (pass --tolerate-floats to convert decimals exactly)"
            ),
            ParseRatError::Malformed(s) => write!(f, "`{s}` is not a rational literal (expected \"p/q\" or an integer)"),
            ParseRatError::ZeroDenominator(s) => write!(f, "`{s}` has a zero denominator"),
        }
    }
}

impl std::error::Error for ParseRatError {}

fn parse_int(s: &str, whole: &str) -> Result<BigInt, ParseRatError> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRatError::Malformed(whole.to_string()));
    }
    s.trim_start_matches('+')
        .parse::<BigInt>()
        .map_err(|_| ParseRatError::Malformed(whole.to_string()))
}

fn looks_decimal(s: &str) -> bool {
    s.contains('.') || s.contains(['e', 'E']) && s.bytes().any(|b| b.is_ascii_digit())
}

/// Parses `"p/q"` or an integer string. Decimal literals are rejected.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(ParseRatError::Empty);
    }
    if looks_decimal(t) {
        return Err(ParseRatError::Decimal(t.to_string()));
    }
    match t.split_once('/') {
        Some((n, d)) => {
            let n = parse_int(n.trim(), t)?;
            let d = parse_int(d.trim(), t)?;
            if d.is_zero() {
                return Err(ParseRatError::ZeroDenominator(t.to_string()));
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(parse_int(t, t)?)),
    }
}

/// Like [`parse_rat`], but also converts decimal literals (`"0.1"`,
/// `"-2.5e-3"`) to the rational they denote exactly. Returns whether a
/// decimal conversion happened.
pub fn parse_rat_lenient(s: &str) -> Result<(Rat, bool), ParseRatError> {
    match parse_rat(s) {
        Ok(r) => Ok((r, false)),
        Err(ParseRatError::Decimal(t)) => parse_decimal(&t).map(|r| (r, true)),
        Err(e) => Err(e),
    }
}

fn parse_decimal(t: &str) -> Result<Rat, ParseRatError> {
    let bad = || ParseRatError::Malformed(t.to_string());
    let (mantissa, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.trim_start_matches('+').parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, fraction) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if whole.is_empty() && fraction.is_empty() {
        return Err(bad());
    }
    if !whole.bytes().chain(fraction.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{whole}{fraction}0").parse().map_err(|_| bad())?;
    let ten = BigInt::from(10);
    // the trailing '0' above keeps the literal non-empty; undo it
    let mut value = Rat::new(digits, ten.clone());
    let shift = exp - fraction.len() as i32;
    let scale = Rat::from_integer(num_traits::pow(ten, shift.unsigned_abs() as usize));
    if shift >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    Ok(if neg { -value } else { value })
}

/// Renders `r` with exactly `digits` digits after the decimal point,
/// rounding half away from zero. Pure integer arithmetic.
pub fn to_decimal(r: &Rat, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = r.abs() * Rat::from_integer(scale.clone());
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let rounded = if rem * BigInt::from(2) >= *scaled.denom() { q + 1 } else { q };
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let sign = if r.is_negative() && !rounded_is_zero(&int_part, &frac_part) { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
    }
}

fn rounded_is_zero(a: &BigInt, b: &BigInt) -> bool {
    a.is_zero() && b.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rat("17/48").unwrap(), frac(17, 48));
        assert_eq!(parse_rat("-4/6").unwrap(), frac(-2, 3));
        assert_eq!(parse_rat(" 3 ").unwrap(), int(3));
        assert_eq!(parse_rat("+5").unwrap(), int(5));
        assert_eq!(parse_rat("2/-4").unwrap(), frac(-1, 2));
    }

    #[test]
    fn rejects_decimals_and_garbage() {
        assert!(matches!(parse_rat("0.1"), Err(ParseRatError::Decimal(_))));
        assert!(matches!(parse_rat("1e3"), Err(ParseRatError::Decimal(_))));
        assert!(matches!(parse_rat("1/0"), Err(ParseRatError::ZeroDenominator(_))));
        assert!(matches!(parse_rat("abc"), Err(ParseRatError::Malformed(_))));
        assert!(matches!(parse_rat("1/2/3"), Err(ParseRatError::Malformed(_))));
        assert!(matches!(parse_rat(""), Err(ParseRatError::Empty)));
    }

    #[test]
    fn lenient_parse_is_exact() {
        assert_eq!(parse_rat_lenient("0.1").unwrap(), (frac(1, 10), true));
        assert_eq!(parse_rat_lenient("-2.5e-3").unwrap(), (frac(-1, 400), true));
        assert_eq!(parse_rat_lenient("1.5E2").unwrap(), (int(150), true));
        assert_eq!(parse_rat_lenient(".25").unwrap(), (frac(1, 4), true));
        assert_eq!(parse_rat_lenient("3/4").unwrap(), (frac(3, 4), false));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&frac(17, 48), 12), "0.354166666667");
        assert_eq!(to_decimal(&frac(1, 6), 12), "0.166666666667");
        assert_eq!(to_decimal(&frac(-1, 8), 3), "-0.125");
        assert_eq!(to_decimal(&frac(-1, 3), 2), "-0.33");
        assert_eq!(to_decimal(&frac(-1, 1000), 2), "0.00");
        assert_eq!(to_decimal(&frac(5, 2), 0), "3");
        assert_eq!(to_decimal(&int(7), 3), "7.000");
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), BigUint::one());
        assert_eq!(factorial(5), BigUint::from(120u32));
        assert_eq!(factorial_rat(15), int(1_307_674_368_000));
    }
}
