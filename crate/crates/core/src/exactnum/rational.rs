use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::Error;

/// Arbitrary-precision rational, always held in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Rational from an integer.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Rational `num / den`. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"` or `"p"` written in decimal.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Nearest double. Works for values whose numerator or denominator exceed
/// the f64 range by scaling both down first.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Decimal expansion truncated to `digits` significant digits, computed by
/// exact long division. Small magnitudes switch to `d.ddde-N` notation.
pub fn rational_to_decimal(r: &Rational, digits: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sign = if r.is_negative() { "-" } else { "" };
    let num = r.numer().abs();
    let den = r.denom().clone();
    let ten = BigInt::from(10);
    // exponent e with 10^e <= |r| < 10^(e+1)
    let mut e: i64 = num.to_string().len() as i64 - den.to_string().len() as i64;
    let pow10 = |k: i64| ten.pow(k.unsigned_abs() as u32);
    let ge = |e: i64| {
        if e >= 0 {
            num >= &den * pow10(e)
        } else {
            &num * pow10(e) >= den
        }
    };
    while !ge(e) {
        e -= 1;
    }
    while ge(e + 1) {
        e += 1;
    }
    let shift = digits as i64 - 1 - e;
    let scaled = if shift >= 0 {
        (&num * pow10(shift)) / &den
    } else {
        &num / (&den * pow10(shift))
    };
    let mantissa = scaled.to_string();
    let body = if e >= 0 {
        let int_len = (e + 1) as usize;
        if int_len >= mantissa.len() {
            format!("{mantissa}{}", "0".repeat(int_len - mantissa.len()))
        } else {
            let (i, f) = mantissa.split_at(int_len);
            let f = f.trim_end_matches('0');
            if f.is_empty() {
                i.to_string()
            } else {
                format!("{i}.{f}")
            }
        }
    } else if e >= -6 {
        let frac = format!("{}{}", "0".repeat((-e - 1) as usize), mantissa);
        format!("0.{}", frac.trim_end_matches('0'))
    } else {
        let (i, f) = mantissa.split_at(1);
        let f = f.trim_end_matches('0');
        if f.is_empty() {
            format!("{i}e{e}")
        } else {
            format!("{i}.{f}e{e}")
        }
    };
    format!("{sign}{body}")
}

/// Wire form of a rational: decimal strings, never floats.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalRepr {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for RationalRepr {
    fn from(r: &Rational) -> Self {
        Self {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

impl TryFrom<&RationalRepr> for Rational {
    type Error = Error;

    fn try_from(repr: &RationalRepr) -> Result<Self, Error> {
        let num: BigInt = repr
            .num
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator {:?}", repr.num)))?;
        let den: BigInt = repr
            .den
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator {:?}", repr.den)))?;
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Rational::new(num, den))
    }
}

/// `#[serde(with = "rational_serde")]` adapter for [`Rational`] fields.
pub mod rational_serde {
    use super::{Rational, RationalRepr};
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        RationalRepr::from(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let repr = RationalRepr::deserialize(d)?;
        Rational::try_from(&repr).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_positive_denominator() {
        let r = ratio(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn parse_and_repr() {
        let r = parse_rational("75602489231060183229976073/487487792008396800000000000").unwrap();
        let repr = RationalRepr::from(&r);
        assert_eq!(repr.num, "75602489231060183229976073");
        assert_eq!(Rational::try_from(&repr).unwrap(), r);
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
    }

    #[test]
    fn float_conversion_of_huge_values() {
        let big = Rational::new(BigInt::from(10).pow(400), BigInt::from(10).pow(399) * 4);
        assert!((rational_to_f64(&big) - 2.5).abs() < 1e-12);
        assert_eq!(rational_to_decimal(&ratio(1, 8), 17), "0.125");
        assert_eq!(rational_to_decimal(&ratio(7, 8), 17), "0.875");
        assert_eq!(rational_to_decimal(&ratio(-2, 3), 5), "-0.66666");
        assert_eq!(rational_to_decimal(&int(120), 17), "120");
        assert_eq!(rational_to_decimal(&ratio(1, 216), 4), "0.004629");
        assert_eq!(rational_to_decimal(&ratio(3, 10_000_000_000), 3), "3e-10");
    }
}
