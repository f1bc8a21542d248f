//! Exact half-integer and rational arithmetic.

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An element of `(1/2)Z`, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt {
    twice: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberParseError {
    #[error("`{0}` is not an integer or a half-integer of the form p/2")]
    NotHalfInteger(String),
    #[error("`{0}` is not a rational number")]
    NotRational(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(n: i64) -> Self {
        HalfInt { twice: 2 * n }
    }

    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub const fn is_zero(self) -> bool {
        self.twice == 0
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// The integer value, if this is an integer.
    pub fn to_int(self) -> Option<i64> {
        self.is_integer().then_some(self.twice / 2)
    }

    /// Largest integer not exceeding the value.
    pub fn floor(self) -> i64 {
        self.twice.div_euclid(2)
    }

    pub fn abs(self) -> Self {
        HalfInt { twice: self.twice.abs() }
    }

    pub fn to_rational(self) -> Rational64 {
        Rational64::new(self.twice, 2)
    }

    /// Exact conversion from a rational, if it lies in `(1/2)Z`.
    pub fn from_rational(r: Rational64) -> Option<Self> {
        let doubled = r * 2;
        doubled.is_integer().then(|| HalfInt { twice: doubled.to_integer() })
    }

    /// Iterate `self, self-1, ..., to` (empty when `to > self`).
    pub fn down_to(self, to: HalfInt) -> impl Iterator<Item = HalfInt> {
        let start = self.twice;
        let steps = if to.twice > start || (start - to.twice) % 2 != 0 {
            0
        } else {
            (start - to.twice) / 2 + 1
        };
        (0..steps).map(move |k| HalfInt { twice: start - 2 * k })
    }
}

impl From<i64> for HalfInt {
    fn from(n: i64) -> Self {
        HalfInt::from_int(n)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice + rhs.twice }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice - rhs.twice }
    }
}

impl Add<i64> for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: i64) -> HalfInt {
        HalfInt { twice: self.twice + 2 * rhs }
    }
}

impl Sub<i64> for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: i64) -> HalfInt {
        HalfInt { twice: self.twice - 2 * rhs }
    }
}

impl AddAssign for HalfInt {
    fn add_assign(&mut self, rhs: HalfInt) {
        self.twice += rhs.twice;
    }
}

impl SubAssign for HalfInt {
    fn sub_assign(&mut self, rhs: HalfInt) {
        self.twice -= rhs.twice;
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { twice: -self.twice }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfInt {
    type Err = NumberParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || NumberParseError::NotHalfInteger(s.to_string());
        match t.split_once('/') {
            None => t.parse::<i64>().map(HalfInt::from_int).map_err(|_| bad()),
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| bad())?;
                match q.trim() {
                    "2" => Ok(HalfInt::from_twice(p)),
                    "1" => Ok(HalfInt::from_int(p)),
                    _ => Err(bad()),
                }
            }
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.to_int() {
            Some(n) => serializer.serialize_i64(n),
            None => serializer.collect_str(self),
        }
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(n) => Ok(HalfInt::from_int(n)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Render a rational as `p/q`, or `p` when integral.
pub fn format_rational(r: &Rational64) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational64, NumberParseError> {
    let t = s.trim();
    let bad = || NumberParseError::NotRational(s.to_string());
    match t.split_once('/') {
        None => t.parse::<i64>().map(Rational64::from_integer).map_err(|_| bad()),
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(NumberParseError::ZeroDenominator(s.to_string()));
            }
            Ok(Rational64::new(p, q))
        }
    }
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rational_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational64, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational64, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn display_and_parse() {
        assert_eq!(HalfInt::from_twice(3).to_string(), "3/2");
        assert_eq!(HalfInt::from_twice(-1).to_string(), "-1/2");
        assert_eq!(HalfInt::from_int(-2).to_string(), "-2");
        assert_eq!("3/2".parse::<HalfInt>().unwrap(), HalfInt::from_twice(3));
        assert_eq!("-4".parse::<HalfInt>().unwrap(), HalfInt::from_int(-4));
        assert!("1/3".parse::<HalfInt>().is_err());
        assert!("x".parse::<HalfInt>().is_err());
    }

    #[test]
    fn floor_and_ranges() {
        assert_eq!(HalfInt::from_twice(3).floor(), 1);
        assert_eq!(HalfInt::from_twice(-1).floor(), -1);
        let xs: Vec<_> = HalfInt::from_int(2).down_to(HalfInt::ZERO).collect();
        assert_eq!(xs, vec![2.into(), 1.into(), 0.into()]);
        assert_eq!(HalfInt::ZERO.down_to(HalfInt::ONE).count(), 0);
        assert_eq!(HalfInt::ONE.down_to(HalfInt::HALF).count(), 0);
    }

    #[test]
    fn json_form() {
        let v = serde_json::to_string(&vec![HalfInt::from_int(2), HalfInt::from_twice(-3)]).unwrap();
        assert_eq!(v, r#"[2,"-3/2"]"#);
        let back: Vec<HalfInt> = serde_json::from_str(&v).unwrap();
        assert_eq!(back, vec![HalfInt::from_int(2), HalfInt::from_twice(-3)]);
    }

    proptest! {
        #[test]
        fn add_sub_exact(a in -1000i64..1000, b in -1000i64..1000) {
            let (x, y) = (HalfInt::from_twice(a), HalfInt::from_twice(b));
            prop_assert_eq!((x + y) - y, x);
            prop_assert!((x + x).is_integer());
            prop_assert_eq!(x < y, x.to_rational() < y.to_rational());
            prop_assert_eq!(x.to_string().parse::<HalfInt>().unwrap(), x);
        }
    }
}
