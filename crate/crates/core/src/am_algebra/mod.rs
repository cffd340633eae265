//! Exact angular momentum algebra: half-integers, signed square roots of
//! rationals, the field Q(sqrt 2), and Clebsch-Gordan coefficients.

mod cg;
mod halfint;
mod quad;
mod sqrt_rational;

pub use cg::cg;
pub use halfint::HalfInt;
pub use quad::QuadRational;
pub use sqrt_rational::SqrtRational;

/// Exact product of two signed square roots as an element of Q(sqrt 2).
pub fn sqrt_product(x: &SqrtRational, y: &SqrtRational) -> crate::error::Result<QuadRational> {
    x.sqrt_product(y)
}
