use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::parse_rational;

/// An angular momentum quantum number, stored as twice its value so that
/// half-integers stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    #[inline]
    pub const fn from_twice(twice: i32) -> Self {
        HalfInt { twice }
    }

    #[inline]
    pub const fn integer(n: i32) -> Self {
        HalfInt { twice: 2 * n }
    }

    #[inline]
    pub const fn twice(self) -> i32 {
        self.twice
    }

    #[inline]
    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub fn abs(self) -> Self {
        HalfInt {
            twice: self.twice.abs(),
        }
    }

    /// Checks that `(j, m)` label a state: `j >= 0`, `|m| <= j`, `j - m` integral.
    pub fn check_pair(j: HalfInt, m: HalfInt) -> Result<()> {
        let fail = |reason| Error::InvalidQuantumNumbers {
            j: j.to_string(),
            m: m.to_string(),
            reason,
        };
        if j.twice < 0 {
            return Err(fail("j must be nonnegative"));
        }
        if (j.twice - m.twice) % 2 != 0 {
            return Err(fail("j and m must both be integers or both half-integers"));
        }
        if m.twice.abs() > j.twice {
            return Err(fail("|m| exceeds j"));
        }
        Ok(())
    }

    /// All projections `m = -j, -j+1, ..., j`.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        let j = self.twice;
        (-j..=j).step_by(2).map(HalfInt::from_twice)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt {
            twice: self.twice + rhs.twice,
        }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt {
            twice: self.twice - rhs.twice,
        }
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
    type Err = Error;

    /// Accepts `1`, `+1`, `-1/2`, `3/2`, `1.5`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "half-integer",
            input: s.to_string(),
        };
        let r = parse_rational(s).map_err(|_| bad())?;
        let doubled = r * num_bigint::BigInt::from(2);
        if !doubled.is_integer() {
            return Err(bad());
        }
        let twice = doubled.to_integer().to_i32().ok_or_else(bad)?;
        Ok(HalfInt::from_twice(twice))
    }
}
