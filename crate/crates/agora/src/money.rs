//! Exact currency arithmetic.
//!
//! Declared amounts (budgets, sticker prices) are whole millidollars.
//! Derived amounts (a linear price for `q` of `size` samples, an equal
//! split of a budget across providers) are exact rationals over
//! millidollars, so every comparison against a budget is exact — no
//! floating-point boundary ambiguity anywhere in the purchase path.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// An exact amount of money, in millidollars.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Money(BigRational);

impl Money {
    pub fn zero() -> Self {
        Money(BigRational::zero())
    }

    /// Whole millidollars.
    pub fn from_milli(milli: i64) -> Self {
        Money(BigRational::from_integer(BigInt::from(milli)))
    }

    /// Whole dollars.
    pub fn from_dollars(dollars: i64) -> Self {
        Self::from_milli(dollars * 1000)
    }

    /// Fractional dollars, rounded to the nearest millidollar.
    pub fn from_dollars_f64(dollars: f64) -> Self {
        Self::from_milli((dollars * 1000.0).round() as i64)
    }

    /// The amount in dollars as a float, for display and scoring.
    pub fn dollars(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN) / 1000.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// `self * num / den`, exact. Used for linear pricing.
    pub fn mul_div(&self, num: u64, den: u64) -> Money {
        assert!(den != 0, "division by zero");
        Money(&self.0 * BigInt::from(num) / BigInt::from(den))
    }

    /// `self / n`, exact. Used for equal budget splits.
    pub fn div_int(&self, n: u64) -> Money {
        assert!(n != 0, "division by zero");
        Money(&self.0 / BigInt::from(n))
    }

    /// Scales by an exact rational read off a float (every finite f64 is an
    /// exact rational). Used for the unit-cost skip threshold.
    pub fn scale_f64(&self, factor: f64) -> Money {
        let r = BigRational::from_float(factor).expect("finite factor");
        Money(&self.0 * r)
    }

    /// Midpoint of two amounts, exact. Used for even-length medians.
    pub fn midpoint(a: &Money, b: &Money) -> Money {
        Money((&a.0 + &b.0) / BigInt::from(2))
    }

    /// Largest integer `q` with `self * q / den <= bound`, i.e.
    /// `floor(bound * den / self)`. Returns `None` when `self` is zero.
    pub(crate) fn inverse_floor(&self, bound: &Money, den: u64) -> Option<u64> {
        if self.0.is_zero() {
            return None;
        }
        let q = (&bound.0 * BigInt::from(den) / &self.0).floor();
        q.to_integer().to_u64()
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl Add<&Money> for Money {
    type Output = Money;
    fn add(self, rhs: &Money) -> Money {
        Money(self.0 + &rhs.0)
    }
}

impl AddAssign<&Money> for Money {
    fn add_assign(&mut self, rhs: &Money) {
        self.0 += &rhs.0;
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl Sub<&Money> for Money {
    type Output = Money;
    fn sub(self, rhs: &Money) -> Money {
        Money(self.0 - &rhs.0)
    }
}

impl<'a> Sum<&'a Money> for Money {
    fn sum<I: Iterator<Item = &'a Money>>(iter: I) -> Money {
        let mut acc = Money::zero();
        for m in iter {
            acc += m;
        }
        acc
    }
}

/// Renders as reduced millidollars: `"150000"` or `"21428571/1000"`.
impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom() == &BigInt::from(1) {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Money {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parse_int = |t: &str| {
            t.parse::<BigInt>()
                .map_err(|e| format!("bad money literal `{s}`: {e}"))
        };
        match s.split_once('/') {
            None => Ok(Money(BigRational::from_integer(parse_int(s)?))),
            Some((num, den)) => {
                let den = parse_int(den)?;
                if den.is_zero() {
                    return Err(format!("bad money literal `{s}`: zero denominator"));
                }
                Ok(Money(BigRational::new(parse_int(num)?, den)))
            }
        }
    }
}

impl Serialize for Money {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}
