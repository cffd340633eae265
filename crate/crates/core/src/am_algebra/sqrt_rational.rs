use std::cmp::Ordering;
use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::Sign;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{
    format_rational, format_significant, rational_sign, rational_sqrt, rational_to_f64,
};

use super::QuadRational;

/// Signed square root of a rational, `sign * sqrt(radicand)`.
///
/// The radicand is kept in lowest terms and is zero exactly when the sign is.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SqrtRational {
    sign: Sign,
    radicand: BigRational,
}

impl SqrtRational {
    pub fn zero() -> Self {
        SqrtRational {
            sign: Sign::NoSign,
            radicand: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        SqrtRational {
            sign: Sign::Plus,
            radicand: BigRational::one(),
        }
    }

    /// `sign * sqrt(radicand)`; a zero radicand forces a zero sign.
    pub fn new(sign: Sign, radicand: BigRational) -> Result<Self> {
        if radicand.is_negative() {
            return Err(Error::InvalidInput(format!(
                "negative radicand {}",
                format_rational(&radicand)
            )));
        }
        if radicand.is_zero() || sign == Sign::NoSign {
            return Ok(Self::zero());
        }
        Ok(SqrtRational { sign, radicand })
    }

    /// The value `r` itself, i.e. `sign(r) * sqrt(r^2)`.
    pub fn from_rational(r: &BigRational) -> Self {
        SqrtRational {
            sign: rational_sign(r),
            radicand: r * r,
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn radicand(&self) -> &BigRational {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::NoSign
    }

    /// Exact square of the value.
    pub fn square(&self) -> BigRational {
        self.radicand.clone()
    }

    /// The value as a rational, when the radicand is a perfect square.
    pub fn to_rational(&self) -> Option<BigRational> {
        let root = rational_sqrt(&self.radicand)?;
        Some(if self.sign == Sign::Minus {
            -root
        } else {
            root
        })
    }

    pub fn to_f64(&self) -> f64 {
        let mag = rational_to_f64(&self.radicand).sqrt();
        match self.sign {
            Sign::Minus => -mag,
            Sign::NoSign => 0.0,
            Sign::Plus => mag,
        }
    }

    /// Correctly rounded decimal rendering.
    pub fn to_decimal_string(&self) -> String {
        format_significant(self.sign, self.to_f64().abs(), |q| {
            // |x| vs q for q > 0: compare radicand with q^2
            if q.is_negative() {
                Ordering::Greater
            } else {
                self.radicand.cmp(&(q * q))
            }
        })
    }

    /// Exact product as an element of Q(sqrt 2).
    pub fn sqrt_product(&self, other: &SqrtRational) -> Result<QuadRational> {
        let sign = self.sign * other.sign;
        if sign == Sign::NoSign {
            return Ok(QuadRational::zero());
        }
        let product = &self.radicand * &other.radicand;
        let signed = |r: BigRational| if sign == Sign::Minus { -r } else { r };
        if let Some(root) = rational_sqrt(&product) {
            return Ok(QuadRational::new(signed(root), BigRational::zero()));
        }
        let half = &product / BigRational::from_integer(2.into());
        if let Some(root) = rational_sqrt(&half) {
            return Ok(QuadRational::new(BigRational::zero(), signed(root)));
        }
        Err(Error::UnsupportedRadicand(format_rational(&product)))
    }
}

impl Mul for &SqrtRational {
    type Output = SqrtRational;
    fn mul(self, rhs: &SqrtRational) -> SqrtRational {
        let sign = self.sign * rhs.sign;
        if sign == Sign::NoSign {
            return SqrtRational::zero();
        }
        SqrtRational {
            sign,
            radicand: &self.radicand * &rhs.radicand,
        }
    }
}

impl Neg for SqrtRational {
    type Output = SqrtRational;
    fn neg(self) -> SqrtRational {
        SqrtRational {
            sign: -self.sign,
            radicand: self.radicand,
        }
    }
}

impl fmt::Display for SqrtRational {
    /// `0`, `+1`, `-1/2`, `+sqrt(1/3)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.sign {
            Sign::NoSign => return f.write_str("0"),
            Sign::Minus => "-",
            Sign::Plus => "+",
        };
        match rational_sqrt(&self.radicand) {
            Some(root) => write!(f, "{sign}{}", format_rational(&root)),
            None => write!(f, "{sign}sqrt({})", format_rational(&self.radicand)),
        }
    }
}
