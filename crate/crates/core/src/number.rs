//! Exact decimal values for catalog weights and thresholds.
//!
//! JSON numbers in a catalog are read as the exact value of their shortest
//! decimal spelling (`0.1` is exactly one tenth, not the nearest binary
//! double). All coverage and threshold comparisons happen on rationals, so
//! boundary cases never depend on floating-point rounding.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A terminating decimal that survives a JSON round trip unchanged.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decimal(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` is not a representable decimal")]
pub struct DecimalError(pub String);

impl Decimal {
    pub fn from_integer(n: u64) -> Self {
        Decimal(BigRational::from_integer(BigInt::from(n)))
    }

    /// `mantissa / 10^scale`, e.g. `Decimal::new(25, 2)` is 0.25.
    pub fn new(mantissa: i64, scale: u32) -> Result<Self, DecimalError> {
        let value = BigRational::new(BigInt::from(mantissa), pow10(scale));
        Self::checked(value)
    }

    pub fn one() -> Self {
        Decimal(BigRational::one())
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    fn checked(value: BigRational) -> Result<Self, DecimalError> {
        let candidate = Decimal(value);
        if candidate.round_trips() {
            Ok(candidate)
        } else {
            Err(DecimalError(candidate.to_string()))
        }
    }

    fn as_u64(&self) -> Option<u64> {
        if self.0.is_integer() {
            self.0.to_integer().to_u64()
        } else {
            None
        }
    }

    fn round_trips(&self) -> bool {
        if self.as_u64().is_some() {
            return true;
        }
        match self.to_string().parse::<f64>() {
            Ok(f) if f.is_finite() => parse_decimal(&f.to_string()).as_ref() == Some(&self.0),
            _ => false,
        }
    }

    pub(crate) fn from_json_number(n: &serde_json::Number) -> Option<Self> {
        if let Some(u) = n.as_u64() {
            return Some(Self::from_integer(u));
        }
        if let Some(i) = n.as_i64() {
            return Some(Decimal(BigRational::from_integer(BigInt::from(i))));
        }
        let f = n.as_f64()?;
        // f64's Display is the shortest string that parses back to `f`
        parse_decimal(&f.to_string()).map(Decimal)
    }

    pub(crate) fn to_json_number(&self) -> serde_json::Number {
        if let Some(u) = self.as_u64() {
            return serde_json::Number::from(u);
        }
        if self.0.is_integer() {
            if let Some(i) = self.0.to_integer().to_i64() {
                return serde_json::Number::from(i);
            }
        }
        let f: f64 = self
            .to_string()
            .parse()
            .expect("decimal spelling is a valid float literal");
        serde_json::Number::from_f64(f).expect("decimals are finite")
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&decimal_string(&self.0))
    }
}

impl FromStr for Decimal {
    type Err = DecimalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let value = parse_decimal(s).ok_or_else(|| DecimalError(s.to_string()))?;
        Self::checked(value)
    }
}

impl serde::Serialize for Decimal {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json_number().serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for Decimal {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let n = serde_json::Number::deserialize(deserializer)?;
        Decimal::from_json_number(&n)
            .ok_or_else(|| serde::de::Error::custom(format!("unrepresentable number {n}")))
    }
}

fn pow10(exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u8), exp as usize)
}

/// Parses `[-]digits[.digits]`. No exponents, no leading `+`.
fn parse_decimal(s: &str) -> Option<BigRational> {
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if body.contains('.') && frac_part.is_empty() {
        return None;
    }
    if !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let value = BigRational::new(digits, pow10(frac_part.len() as u32));
    Some(if negative { -value } else { value })
}

/// Exact decimal expansion of a rational whose denominator divides a power of ten.
fn decimal_string(value: &BigRational) -> String {
    let negative = value.is_negative();
    let abs = value.abs();
    let denom = abs.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let mut rest = denom.clone();
    let two = BigInt::from(2u8);
    let five = BigInt::from(5u8);
    while rest.is_even() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    debug_assert!(rest.is_one(), "non-terminating decimal");
    let scale = twos.max(fives);
    let scaled = abs.numer() * (pow10(scale) / denom);
    let mut digits = scaled.to_string();
    if scale > 0 {
        let scale = scale as usize;
        if digits.len() <= scale {
            digits = format!("{}{}", "0".repeat(scale - digits.len() + 1), digits);
        }
        digits.insert(digits.len() - scale, '.');
    }
    if negative {
        digits.insert(0, '-');
    }
    digits
}
