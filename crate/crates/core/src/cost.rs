//! Exact signed rational edge costs.
//!
//! Every cost in the toolkit is a [`RationalCost`]. Gadget costs such as
//! `-2m`, `1/(m+1)` and `1/(2m+2)` must compare exactly, so there is no
//! floating point anywhere on the cost path.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A rational number kept in lowest terms with a positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RationalCost(Ratio<i128>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CostParseError {
    #[error("empty cost")]
    Empty,
    #[error("invalid integer in cost `{0}`")]
    InvalidInteger(String),
    #[error("zero denominator in cost `{0}`")]
    ZeroDenominator(String),
}

impl RationalCost {
    pub const ZERO: RationalCost = RationalCost(Ratio::new_raw(0, 1));

    /// Builds `numerator / denominator`, normalizing sign and common factors.
    /// Returns `None` when `denominator` is zero.
    pub fn new(numerator: i128, denominator: i128) -> Option<Self> {
        if denominator == 0 {
            None
        } else {
            Some(Self(Ratio::new(numerator, denominator)))
        }
    }

    pub fn integer(value: i128) -> Self {
        Self(Ratio::from_integer(value))
    }

    pub fn numerator(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denominator(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }
}

impl fmt::Display for RationalCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator(), self.denominator())
    }
}

impl fmt::Debug for RationalCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for RationalCost {
    type Err = CostParseError;

    /// Accepts `num/den` or a bare integer.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(CostParseError::Empty);
        }
        let parse = |part: &str| {
            part.trim()
                .parse::<i128>()
                .map_err(|_| CostParseError::InvalidInteger(s.to_string()))
        };
        match s.split_once('/') {
            Some((num, den)) => {
                let (num, den) = (parse(num)?, parse(den)?);
                RationalCost::new(num, den).ok_or_else(|| CostParseError::ZeroDenominator(s.to_string()))
            }
            None => Ok(RationalCost::integer(parse(s)?)),
        }
    }
}

impl From<i128> for RationalCost {
    fn from(value: i128) -> Self {
        Self::integer(value)
    }
}

impl Add for RationalCost {
    type Output = RationalCost;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl AddAssign for RationalCost {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

impl Sub for RationalCost {
    type Output = RationalCost;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Neg for RationalCost {
    type Output = RationalCost;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl Mul<i128> for RationalCost {
    type Output = RationalCost;
    fn mul(self, rhs: i128) -> Self {
        Self(self.0 * rhs)
    }
}

impl Sum for RationalCost {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(RationalCost::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a RationalCost> for RationalCost {
    fn sum<I: Iterator<Item = &'a Self>>(iter: I) -> Self {
        iter.copied().sum()
    }
}

impl Serialize for RationalCost {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RationalCost {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i128, d: i128) -> RationalCost {
        RationalCost::new(n, d).unwrap()
    }

    #[test]
    fn normalizes_sign_and_factors() {
        let c = q(6, -8);
        assert_eq!((c.numerator(), c.denominator()), (-3, 4));
        assert_eq!(q(0, -5), RationalCost::ZERO);
        assert_eq!(RationalCost::ZERO.to_string(), "0/1");
        assert!(RationalCost::new(1, 0).is_none());
    }

    #[test]
    fn gadget_costs_add_exactly() {
        // m = 3: 1/(2m+2) + 0 + 1/(2m+2) = 1/(m+1)
        let half = q(1, 8);
        assert_eq!(half + RationalCost::ZERO + half, q(1, 4));
        // m + (-2m) + m cancels
        let m = RationalCost::integer(3);
        assert_eq!(m + m * -2 + m, RationalCost::ZERO);
        // m/(m+1) < 1 strictly
        assert!(q(3, 4) < RationalCost::integer(1));
    }

    #[test]
    fn parses_both_forms() {
        assert_eq!("-1/2".parse::<RationalCost>().unwrap(), q(-1, 2));
        assert_eq!("7".parse::<RationalCost>().unwrap(), RationalCost::integer(7));
        assert_eq!("2/4".parse::<RationalCost>().unwrap().to_string(), "1/2");
        assert!(matches!("1/0".parse::<RationalCost>(), Err(CostParseError::ZeroDenominator(_))));
        assert!(matches!("x".parse::<RationalCost>(), Err(CostParseError::InvalidInteger(_))));
        assert!(matches!(" ".parse::<RationalCost>(), Err(CostParseError::Empty)));
    }

    proptest! {
        #[test]
        fn addition_commutes_and_stays_normalized(a in -50i128..50, b in 1i128..20, c in -50i128..50, d in 1i128..20) {
            let (x, y) = (q(a, b), q(c, d));
            prop_assert_eq!(x + y, y + x);
            let s = x + y;
            prop_assert!(s.denominator() > 0);
            prop_assert_eq!(num_integer::gcd(s.numerator(), s.denominator()), 1);
            // order agrees with cross multiplication
            prop_assert_eq!(x < y, a * d < c * b);
        }

        #[test]
        fn display_parse_roundtrip(a in -1000i128..1000, b in 1i128..100) {
            let x = q(a, b);
            prop_assert_eq!(x.to_string().parse::<RationalCost>().unwrap(), x);
        }
    }
}
