use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::Sign;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, format_significant, rational_sign, rational_to_f64};

/// An element `a + b*sqrt(2)` of the quadratic field Q(sqrt 2).
///
/// Both parts are `BigRational`s and therefore always in lowest terms, so
/// structural equality is field equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QuadRational {
    a: BigRational,
    b: BigRational,
}

impl QuadRational {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QuadRational { a, b }
    }

    pub fn from_rational(a: BigRational) -> Self {
        QuadRational {
            a,
            b: BigRational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn sqrt2_part(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Exact sign. Uses irrationality of sqrt 2: `a^2 = 2 b^2` forces `a = b = 0`.
    pub fn sign(&self) -> Sign {
        let sa = rational_sign(&self.a);
        let sb = rational_sign(&self.b);
        match (sa, sb) {
            (s, Sign::NoSign) | (Sign::NoSign, s) => s,
            (x, y) if x == y => x,
            _ => {
                let a2 = &self.a * &self.a;
                let b2 = &self.b * &self.b * BigRational::from_integer(2.into());
                if a2 > b2 {
                    sa
                } else {
                    sb
                }
            }
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.sign() != Sign::Minus
    }

    pub fn abs(&self) -> Self {
        if self.sign() == Sign::Minus {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Galois conjugate `a - b*sqrt(2)`.
    pub fn conjugate(&self) -> Self {
        QuadRational {
            a: self.a.clone(),
            b: -self.b.clone(),
        }
    }

    /// Field norm `a^2 - 2 b^2`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(2.into())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        QuadRational {
            a: &self.a * k,
            b: &self.b * k,
        }
    }

    pub fn checked_div(&self, rhs: &QuadRational) -> Result<Self> {
        let norm = rhs.norm();
        if norm.is_zero() {
            return Err(Error::InvalidInput("division by zero".into()));
        }
        Ok((self * &rhs.conjugate()).scale(&(BigRational::from_integer(1.into()) / norm)))
    }

    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        let diff = QuadRational {
            a: &self.a - q,
            b: self.b.clone(),
        };
        match diff.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.a) + rational_to_f64(&self.b) * std::f64::consts::SQRT_2
    }

    /// Correctly rounded 15-significant-digit rendering.
    pub fn to_decimal_string(&self) -> String {
        let magnitude = self.abs();
        format_significant(self.sign(), self.to_f64().abs(), |q| {
            magnitude.cmp_rational(q)
        })
    }
}

impl PartialOrd for QuadRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self - other).sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

impl Add for &QuadRational {
    type Output = QuadRational;
    fn add(self, rhs: &QuadRational) -> QuadRational {
        QuadRational {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl Add for QuadRational {
    type Output = QuadRational;
    fn add(self, rhs: QuadRational) -> QuadRational {
        &self + &rhs
    }
}

impl AddAssign<&QuadRational> for QuadRational {
    fn add_assign(&mut self, rhs: &QuadRational) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl Sub for &QuadRational {
    type Output = QuadRational;
    fn sub(self, rhs: &QuadRational) -> QuadRational {
        QuadRational {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl Sub for QuadRational {
    type Output = QuadRational;
    fn sub(self, rhs: QuadRational) -> QuadRational {
        &self - &rhs
    }
}

impl Mul for &QuadRational {
    type Output = QuadRational;
    fn mul(self, rhs: &QuadRational) -> QuadRational {
        let two = BigRational::from_integer(2.into());
        QuadRational {
            a: &self.a * &rhs.a + &self.b * &rhs.b * two,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

impl Mul for QuadRational {
    type Output = QuadRational;
    fn mul(self, rhs: QuadRational) -> QuadRational {
        &self * &rhs
    }
}

impl Neg for QuadRational {
    type Output = QuadRational;
    fn neg(self) -> QuadRational {
        QuadRational {
            a: -self.a,
            b: -self.b,
        }
    }
}

impl Sum for QuadRational {
    fn sum<I: Iterator<Item = QuadRational>>(iter: I) -> Self {
        iter.fold(QuadRational::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl From<BigRational> for QuadRational {
    fn from(a: BigRational) -> Self {
        QuadRational::from_rational(a)
    }
}

impl fmt::Display for QuadRational {
    /// `1/3`, `3 + 4√2`, `1/2 - (1/6)√2`, `(1/3)√2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeff = |b: &BigRational| -> String {
            if b.is_integer() {
                if *b == BigRational::from_integer(1.into()) {
                    String::new()
                } else {
                    format_rational(b)
                }
            } else {
                format!("({})", format_rational(b))
            }
        };
        if self.b.is_zero() {
            return f.write_str(&format_rational(&self.a));
        }
        if self.a.is_zero() {
            let sign = if self.b.is_negative() { "-" } else { "" };
            return write!(f, "{sign}{}√2", coeff(&self.b.abs()));
        }
        let op = if self.b.is_negative() { '-' } else { '+' };
        write!(
            f,
            "{} {op} {}√2",
            format_rational(&self.a),
            coeff(&self.b.abs())
        )
    }
}
