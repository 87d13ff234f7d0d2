//! Exact signed dyadic rationals `k / 2^m`.
//!
//! Every amplitude and probability that shows up when regrouping two Bell
//! pairs is of this form (±1, ±1/2, ±1/4, ...), so identities can be checked
//! bit-exactly without a tolerance policy.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// `num / 2^exp`, kept in lowest terms (`num` odd unless `exp == 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    num: i64,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };
    pub const HALF: Dyadic = Dyadic { num: 1, exp: 1 };
    pub const QUARTER: Dyadic = Dyadic { num: 1, exp: 2 };

    pub fn new(num: i64, exp: u32) -> Self {
        Dyadic { num, exp }.reduced()
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic { num: n, exp: 0 }
    }

    fn reduced(mut self) -> Self {
        if self.num == 0 {
            return Self::ZERO;
        }
        while self.exp > 0 && self.num % 2 == 0 {
            self.num /= 2;
            self.exp -= 1;
        }
        self
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    /// Power of two in the denominator.
    pub fn exponent(self) -> u32 {
        self.exp
    }

    pub fn denominator(self) -> u64 {
        1u64 << self.exp
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_negative(self) -> bool {
        self.num < 0
    }

    pub fn abs(self) -> Self {
        Dyadic { num: self.num.abs(), exp: self.exp }
    }

    pub fn square(self) -> Self {
        self * self
    }

    /// Rescales the numerator to denominator `2^exp`; `exp` must be at least `self.exponent()`.
    pub fn numerator_at(self, exp: u32) -> i64 {
        debug_assert!(exp >= self.exp);
        self.num << (exp - self.exp)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (1u64 << self.exp) as f64
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        Dyadic::new(self.numerator_at(exp) + rhs.numerator_at(exp), exp)
    }
}

impl AddAssign for Dyadic {
    fn add_assign(&mut self, rhs: Dyadic) {
        *self = *self + rhs;
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -self.num, exp: self.exp }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::new(self.num * rhs.num, self.exp + rhs.exp)
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |acc, d| acc + d)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        self.numerator_at(exp).cmp(&other.numerator_at(exp))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.denominator())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a dyadic rational: {0:?}")]
pub struct ParseDyadicError(String);

impl FromStr for Dyadic {
    type Err = ParseDyadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseDyadicError(s.to_string());
        let t = s.trim().trim_start_matches('+');
        match t.split_once('/') {
            None => t.parse::<i64>().map(Dyadic::from_int).map_err(|_| bad()),
            Some((n, d)) => {
                let num: i64 = n.trim().parse().map_err(|_| bad())?;
                let den: u64 = d.trim().parse().map_err(|_| bad())?;
                if den == 0 || !den.is_power_of_two() {
                    return Err(bad());
                }
                Ok(Dyadic::new(num, den.trailing_zeros()))
            }
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    fn as_ratio(d: Dyadic) -> Ratio<i64> {
        Ratio::new(d.numerator(), d.denominator() as i64)
    }

    fn small() -> impl Strategy<Value = Dyadic> {
        (-1000i64..1000, 0u32..12).prop_map(|(n, e)| Dyadic::new(n, e))
    }

    proptest! {
        #[test]
        fn arithmetic_matches_rationals(a in small(), b in small()) {
            prop_assert_eq!(as_ratio(a + b), as_ratio(a) + as_ratio(b));
            prop_assert_eq!(as_ratio(a - b), as_ratio(a) - as_ratio(b));
            prop_assert_eq!(as_ratio(a * b), as_ratio(a) * as_ratio(b));
            prop_assert_eq!(a.cmp(&b), as_ratio(a).cmp(&as_ratio(b)));
        }

        #[test]
        fn display_parses_back(a in small()) {
            prop_assert_eq!(a.to_string().parse::<Dyadic>().unwrap(), a);
        }
    }

    #[test]
    fn lowest_terms() {
        assert_eq!(Dyadic::new(2, 2), Dyadic::HALF);
        assert_eq!(Dyadic::new(0, 5), Dyadic::ZERO);
        assert_eq!(Dyadic::HALF + Dyadic::HALF, Dyadic::ONE);
        assert_eq!(Dyadic::HALF.square(), Dyadic::QUARTER);
        assert_eq!((-Dyadic::HALF).to_string(), "-1/2");
    }

    #[test]
    fn rejects_non_dyadic() {
        assert!("1/3".parse::<Dyadic>().is_err());
        assert!("1/0".parse::<Dyadic>().is_err());
        assert_eq!("+1/4".parse::<Dyadic>().unwrap(), Dyadic::QUARTER);
    }
}
