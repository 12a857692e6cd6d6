//! Numeric backends.
//!
//! Affine and polyhedral work runs over exact rationals; Gram and SDP work
//! runs over `f64`. Vector types in [`crate::mappings`] are generic over
//! [`Scalar`] so the same maps serve both backends.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Tolerance used by the floating backend for equality and sign tests.
pub const FLOAT_TOL: f64 = 1e-9;

pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Send + Sync + num_traits::Num + std::ops::Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Equality as used by validation predicates: exact for rationals,
    /// within [`FLOAT_TOL`] for floats.
    fn near(&self, other: &Self) -> bool;
    /// Nonnegativity with the same convention as [`Scalar::near`].
    fn is_nonneg(&self) -> bool;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }
}

impl Scalar for Rational {
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn near(&self, other: &Self) -> bool {
        self == other
    }

    fn is_nonneg(&self) -> bool {
        !self.is_negative()
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => parse_rational(&n.to_string()),
            other => Err(Error::Parse(format!("expected a rational, got {other}"))),
        }
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn near(&self, other: &Self) -> bool {
        (self - other).abs() <= FLOAT_TOL
    }

    fn is_nonneg(&self) -> bool {
        *self >= -FLOAT_TOL
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self).map(Value::Number).unwrap_or(Value::Null)
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(format!("number {n} is not representable"))),
            Value::String(s) => Ok(rational_to_f64(&parse_rational(s)?)),
            other => Err(Error::Parse(format!("expected a number, got {other}"))),
        }
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Scale down both parts so the quotient survives conversion.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Parses `"p/q"`, integers, and plain decimals such as `"-0.25"` or
/// `"1e-3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("cannot parse {s:?} as a rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
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
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(if joined.is_empty() { "0" } else { &joined }).map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Nearest rational with the given denominator.
pub fn rational_with_denominator(x: f64, den: i64) -> Rational {
    let scaled = (x * den as f64).round();
    Rational::new(BigInt::from(scaled as i128), BigInt::from(den))
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Scales a rational vector by a positive factor so it becomes a primitive
/// integer vector (coprime entries). The zero vector is returned unchanged.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

pub fn int_to_rational(v: &BigInt) -> Rational {
    Rational::from_integer(v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse_rational("10").unwrap(), rat(10));
        assert_eq!(parse_rational("1e-3").unwrap(), ratio(1, 1000));
        assert_eq!(parse_rational("2.5E2").unwrap(), rat(250));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("-").is_err());
    }

    #[test]
    fn rational_json_is_a_string() {
        assert_eq!(ratio(-3, 4).to_json(), Value::String("-3/4".into()));
        assert_eq!(rat(10).to_json(), Value::String("10".into()));
        assert_eq!(Rational::from_json(&serde_json::json!(0.5)).unwrap(), ratio(1, 2));
    }

    #[test]
    fn primitive_vector_divides_common_factor() {
        let v = vec![ratio(1, 2), ratio(-3, 2), rat(0)];
        assert_eq!(primitive_integer_vector(&v), vec![BigInt::from(1), BigInt::from(-3), BigInt::from(0)]);
        let w = vec![rat(4), rat(6)];
        assert_eq!(primitive_integer_vector(&w), vec![BigInt::from(2), BigInt::from(3)]);
    }

    #[test]
    fn denominator_rounding_hits_exact_half() {
        let y = 2.0 / std::f64::consts::PI * (1.0 / 2f64.sqrt()).asin();
        assert_eq!(rational_with_denominator(y, 1_000_000_000_000), ratio(1, 2));
    }
}
