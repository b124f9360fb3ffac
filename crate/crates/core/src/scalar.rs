//! Matrix entries that are either exact rationals ("p/q", integers) or floats.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use crate::error::{FqError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Scalar {
    pub value: f64,
    pub exact: Option<BigRational>,
}

impl Scalar {
    pub fn float(v: f64) -> Self {
        Scalar { value: v, exact: None }
    }

    pub fn rational(r: BigRational) -> Self {
        Scalar { value: rat_to_f64(&r), exact: Some(r) }
    }

    pub fn int(v: i64) -> Self {
        Scalar::rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Scalar::rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }
}

impl FromStr for Scalar {
    type Err = FqError;

    fn from_str(s: &str) -> Result<Self> {
        parse_scalar(s)
    }
}

pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|e| FqError::Parse(format!("{t}: {e}")))?;
        let q = BigInt::from_str(q.trim()).map_err(|e| FqError::Parse(format!("{t}: {e}")))?;
        if q.is_zero() {
            return Err(FqError::Parse(format!("{t}: zero denominator")));
        }
        return Ok(Scalar::rational(BigRational::new(p, q)));
    }
    if let Ok(i) = BigInt::from_str(t) {
        return Ok(Scalar::rational(BigRational::from_integer(i)));
    }
    let v = f64::from_str(t).map_err(|e| FqError::Parse(format!("{t}: {e}")))?;
    if !v.is_finite() {
        return Err(FqError::Parse(format!("{t}: not finite")));
    }
    Ok(Scalar::float(v))
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    match r.to_f64() {
        Some(v) => v,
        None => {
            let n = r.numer().to_f64().unwrap_or(f64::NAN);
            let d = r.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Some(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            None => write!(f, "{}", self.value),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawScalar {
    Str(String),
    Int(i64),
    Float(f64),
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RawScalar::deserialize(d)? {
            RawScalar::Str(s) => parse_scalar(&s).map_err(serde::de::Error::custom),
            RawScalar::Int(i) => Ok(Scalar::int(i)),
            RawScalar::Float(v) => Ok(Scalar::float(v)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        let a = parse_scalar("-1/2").unwrap();
        assert_eq!(a.exact, Some(rat(-1, 2)));
        assert_eq!(a.value, -0.5);
        let b = parse_scalar("0.3").unwrap();
        assert!(b.exact.is_none());
        assert_eq!(b.value, 0.3);
        assert_eq!(parse_scalar("7").unwrap().exact, Some(rat_int(7)));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
    }

    #[test]
    fn json_round_trip() {
        let v: Vec<Scalar> = serde_json::from_str(r#"["3/10", 2, 0.25]"#).unwrap();
        assert_eq!(v[0].exact, Some(rat(3, 10)));
        assert_eq!(v[1].exact, Some(rat_int(2)));
        assert_eq!(v[2].value, 0.25);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["3/10","2","0.25"]"#);
    }
}
