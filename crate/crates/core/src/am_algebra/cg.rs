use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Result;

use super::{HalfInt, SqrtRational};

fn factorial(n: i32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Clebsch-Gordan coefficient `<j1 m1; j2 m2 | J M>` in the Condon-Shortley
/// phase convention, from the Racah closed formula.
///
/// Vanishes (returns zero) when `M != m1 + m2` or the triangle rule fails.
/// Invalid `(j, m)` pairs are an error.
pub fn cg(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<SqrtRational> {
    HalfInt::check_pair(j1, m1)?;
    HalfInt::check_pair(j2, m2)?;
    HalfInt::check_pair(j, m)?;

    let (tj1, tm1, tj2, tm2, tj, tm) = (
        j1.twice(),
        m1.twice(),
        j2.twice(),
        m2.twice(),
        j.twice(),
        m.twice(),
    );
    if tm != tm1 + tm2 {
        return Ok(SqrtRational::zero());
    }
    if tj < (tj1 - tj2).abs() || tj > tj1 + tj2 || (tj1 + tj2 + tj) % 2 != 0 {
        return Ok(SqrtRational::zero());
    }

    // Integer arguments of the factorials. All are >= 0 after the checks above.
    let j1pj2mj = (tj1 + tj2 - tj) / 2;
    let jmj2pm1 = (tj - tj2 + tm1) / 2;
    let jmj1mm2 = (tj - tj1 - tm2) / 2;
    let j1mm1 = (tj1 - tm1) / 2;
    let j2pm2 = (tj2 + tm2) / 2;

    let k_min = 0.max(-jmj2pm1).max(-jmj1mm2);
    let k_max = j1pj2mj.min(j1mm1).min(j2pm2);

    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let denom = factorial(k)
            * factorial(j1pj2mj - k)
            * factorial(j1mm1 - k)
            * factorial(j2pm2 - k)
            * factorial(jmj2pm1 + k)
            * factorial(jmj1mm2 + k);
        let term = BigRational::new(BigInt::one(), denom);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return Ok(SqrtRational::zero());
    }

    let triangle = BigRational::new(
        BigInt::from(tj + 1)
            * factorial((tj + tj1 - tj2) / 2)
            * factorial((tj - tj1 + tj2) / 2)
            * factorial(j1pj2mj),
        factorial((tj1 + tj2 + tj) / 2 + 1),
    );
    let projections = factorial((tj + tm) / 2)
        * factorial((tj - tm) / 2)
        * factorial(j1mm1)
        * factorial((tj1 + tm1) / 2)
        * factorial((tj2 - tm2) / 2)
        * factorial(j2pm2);

    let sign = if sum.is_negative() {
        Sign::Minus
    } else {
        Sign::Plus
    };
    let radicand = triangle * BigRational::from_integer(projections) * &sum * &sum;
    SqrtRational::new(sign, radicand)
}
