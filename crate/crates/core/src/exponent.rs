//! The ordered domain of exponent thresholds: exact rationals with an
//! optional plus flag, so that `a < a+ < b` whenever `a < b`.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::Signed;

use crate::error::{Error, Result};

/// Exact rational exponent value.
pub type Rational = Ratio<i64>;

/// An exponent threshold: a positive rational `p/q` in lowest terms,
/// optionally flagged as the "plus" variant sitting strictly between the
/// rational and everything above it.
///
/// The derived ordering is lexicographic on `(value, plus)`, which realizes
/// the intended total order. Serializes as its text form, e.g. `"7/3+"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtExponent {
    value: Rational,
    plus: bool,
}

impl serde::Serialize for ExtExponent {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for ExtExponent {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl ExtExponent {
    pub fn new(value: Rational, plus: bool) -> Result<Self> {
        if !value.is_positive() {
            return Err(Error::NonPositiveExponent);
        }
        Ok(ExtExponent { value, plus })
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::ZeroDenominator);
        }
        Self::new(Rational::new(numer, denom), false)
    }

    pub fn integer(n: i64) -> Self {
        ExtExponent { value: Rational::from_integer(n), plus: false }
    }

    pub fn integer_plus(n: i64) -> Self {
        ExtExponent { value: Rational::from_integer(n), plus: true }
    }

    /// The same threshold with the plus flag set.
    pub fn plus(self) -> Self {
        ExtExponent { plus: true, ..self }
    }

    pub fn value(&self) -> Rational {
        self.value
    }

    pub fn is_plus(&self) -> bool {
        self.plus
    }

    /// Ceiling; by convention the plus flag does not change it.
    pub fn ceil(&self) -> i64 {
        self.value.ceil().to_integer()
    }

    /// Is a word with critical exponent `ce` free of this threshold?
    /// Plain `a` means `ce < a`; the plus variant `a+` means `ce <= a`.
    pub fn admits(&self, ce: Rational) -> bool {
        if self.plus {
            ce <= self.value
        } else {
            ce < self.value
        }
    }
}

impl fmt::Display for ExtExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value.is_integer() {
            write!(f, "{}", self.value.numer())?;
        } else {
            write!(f, "{}/{}", self.value.numer(), self.value.denom())?;
        }
        if self.plus {
            write!(f, "+")?;
        }
        Ok(())
    }
}

impl FromStr for ExtExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, plus) = match s.strip_suffix('+') {
            Some(b) => (b, true),
            None => (s, false),
        };
        let malformed = || Error::MalformedExponent(s.to_string());
        let (numer, denom) = match body.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| malformed())?;
                let q: i64 = q.trim().parse().map_err(|_| malformed())?;
                (p, q)
            }
            None => (body.trim().parse().map_err(|_| malformed())?, 1),
        };
        if denom == 0 {
            return Err(Error::ZeroDenominator);
        }
        let value = Rational::new(numer, denom);
        if !value.is_positive() {
            return Err(Error::NonPositiveExponent);
        }
        Ok(ExtExponent { value, plus })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_interleaves_plus() {
        let a = ExtExponent::from_ratio(7, 3).unwrap();
        let ap = a.plus();
        let b = ExtExponent::integer(3);
        assert!(a < ap);
        assert!(ap < b);
        assert!(b < b.plus());
    }

    #[test]
    fn ceil_ignores_plus() {
        assert_eq!(ExtExponent::integer_plus(3).ceil(), 3);
        assert_eq!(ExtExponent::from_ratio(7, 3).unwrap().ceil(), 3);
        assert_eq!(ExtExponent::from_ratio(7, 3).unwrap().plus().ceil(), 3);
    }

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["7/3", "3+", "7/3+", "2", "5/2"] {
            let e: ExtExponent = s.parse().unwrap();
            assert_eq!(e.to_string(), s);
        }
        // reduced form
        let e: ExtExponent = "14/6+".parse().unwrap();
        assert_eq!(e.to_string(), "7/3+");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(ExtExponent::from_str("").is_err());
        assert!(ExtExponent::from_str("7/0").is_err());
        assert!(ExtExponent::from_str("-1/2").is_err());
        assert!(ExtExponent::from_str("0").is_err());
        assert!(ExtExponent::from_str("a/b").is_err());
        assert!(ExtExponent::from_str("7//3").is_err());
    }

    #[test]
    fn admits_distinguishes_plus_only_at_equality() {
        let three = ExtExponent::integer(3);
        assert!(!three.admits(Rational::from_integer(3)));
        assert!(three.plus().admits(Rational::from_integer(3)));
        assert!(three.admits(Rational::new(7, 3)));
        assert!(!three.admits(Rational::new(10, 3)));
    }
}
