//! Exact measure values: non-negative rationals extended with infinity.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value as Json};

/// A measure result: an exact rational or the distinguished value `inf`.
///
/// Rationals are kept in lowest terms with a positive denominator
/// (`BigRational` normalizes on construction). The order is total and
/// `Infinite` is greater than every finite value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MeasureValue {
    Finite(BigRational),
    Infinite,
}

impl MeasureValue {
    pub fn zero() -> Self {
        MeasureValue::Finite(BigRational::zero())
    }

    pub fn one() -> Self {
        MeasureValue::Finite(BigRational::one())
    }

    pub fn from_int(n: u64) -> Self {
        MeasureValue::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        MeasureValue::Finite(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, MeasureValue::Infinite)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, MeasureValue::Finite(r) if r.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            MeasureValue::Finite(r) => Some(r),
            MeasureValue::Infinite => None,
        }
    }

    /// Subtraction that saturates at zero and propagates infinity
    /// (`inf - x = inf`). Used by measures defined as "... minus 1".
    pub fn saturating_sub_int(&self, n: u64) -> MeasureValue {
        match self {
            MeasureValue::Infinite => MeasureValue::Infinite,
            MeasureValue::Finite(r) => {
                let d = r - BigRational::from_integer(BigInt::from(n));
                if d.is_negative() {
                    MeasureValue::zero()
                } else {
                    MeasureValue::Finite(d)
                }
            }
        }
    }

    /// Canonical JSON encoding: `{"num": "..", "den": ".."}` or `"inf"`.
    /// Numerator and denominator are decimal strings so arbitrary
    /// precision survives the trip through JSON.
    pub fn to_json(&self) -> Json {
        match self {
            MeasureValue::Infinite => json!("inf"),
            MeasureValue::Finite(r) => json!({
                "num": r.numer().to_string(),
                "den": r.denom().to_string(),
            }),
        }
    }

    /// Parses `inf`, `p/q`, integer, or decimal literals, all exact.
    pub fn parse(text: &str) -> Result<MeasureValue, String> {
        let t = text.trim();
        if t == "inf" || t == "infinity" {
            return Ok(MeasureValue::Infinite);
        }
        parse_exact_rational(t).map(MeasureValue::Finite)
    }
}

/// Parses `p/q`, integer, or decimal literals into an exact rational.
pub fn parse_exact_rational(t: &str) -> Result<BigRational, String> {
    if let Some((num, den)) = t.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in `{t}`"))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in `{t}`"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in `{t}`"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let sign = if whole.trim_start().starts_with('-') { -1 } else { 1 };
        let w: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| format!("bad decimal `{t}`"))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal `{t}`"));
        }
        let f: BigInt = frac.parse().map_err(|_| format!("bad decimal `{t}`"))?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let magnitude = w.abs() * &scale + f;
        return Ok(BigRational::new(magnitude * BigInt::from(sign), scale));
    }
    let n: BigInt = t.parse().map_err(|_| format!("bad number `{t}`"))?;
    Ok(BigRational::from_integer(n))
}

impl PartialOrd for MeasureValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MeasureValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (MeasureValue::Infinite, MeasureValue::Infinite) => Ordering::Equal,
            (MeasureValue::Infinite, MeasureValue::Finite(_)) => Ordering::Greater,
            (MeasureValue::Finite(_), MeasureValue::Infinite) => Ordering::Less,
            (MeasureValue::Finite(a), MeasureValue::Finite(b)) => a.cmp(b),
        }
    }
}

impl Add for MeasureValue {
    type Output = MeasureValue;
    fn add(self, rhs: MeasureValue) -> MeasureValue {
        match (self, rhs) {
            (MeasureValue::Finite(a), MeasureValue::Finite(b)) => MeasureValue::Finite(a + b),
            _ => MeasureValue::Infinite,
        }
    }
}

impl Sub for MeasureValue {
    type Output = MeasureValue;
    fn sub(self, rhs: MeasureValue) -> MeasureValue {
        match (self, rhs) {
            (MeasureValue::Finite(a), MeasureValue::Finite(b)) => MeasureValue::Finite(a - b),
            (MeasureValue::Infinite, MeasureValue::Finite(_)) => MeasureValue::Infinite,
            _ => panic!("subtraction with infinite right operand"),
        }
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureValue::Infinite => write!(f, "inf"),
            MeasureValue::Finite(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_are_exact() {
        // 1/2 + 1/3 + 1/3 + 1/4 = 17/12
        let v = MeasureValue::ratio(1, 2)
            + MeasureValue::ratio(1, 3)
            + MeasureValue::ratio(1, 3)
            + MeasureValue::ratio(1, 4);
        assert_eq!(v, MeasureValue::ratio(17, 12));
    }

    #[test]
    fn infinity_is_greatest_and_propagates() {
        assert!(MeasureValue::Infinite > MeasureValue::from_int(1_000_000));
        assert_eq!(
            MeasureValue::Infinite.saturating_sub_int(1),
            MeasureValue::Infinite
        );
        assert_eq!(
            MeasureValue::from_int(3) + MeasureValue::Infinite,
            MeasureValue::Infinite
        );
    }

    #[test]
    fn parse_forms() {
        assert_eq!(MeasureValue::parse("17/12").unwrap(), MeasureValue::ratio(17, 12));
        assert_eq!(MeasureValue::parse("0.5").unwrap(), MeasureValue::ratio(1, 2));
        assert_eq!(MeasureValue::parse("-1.25").unwrap(), MeasureValue::ratio(-5, 4));
        assert_eq!(MeasureValue::parse("7").unwrap(), MeasureValue::from_int(7));
        assert_eq!(MeasureValue::parse("inf").unwrap(), MeasureValue::Infinite);
        assert!(MeasureValue::parse("1/0").is_err());
        assert!(MeasureValue::parse("abc").is_err());
    }

    #[test]
    fn json_encoding_is_canonical() {
        assert_eq!(
            MeasureValue::ratio(17, 12).to_json().to_string(),
            r#"{"den":"12","num":"17"}"#
        );
        assert_eq!(MeasureValue::Infinite.to_json().to_string(), r#""inf""#);
    }
}
