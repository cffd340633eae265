//! Polarization knobs and the substate populations they imply.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::am_algebra::HalfInt;
use crate::error::{Error, Result};
use crate::numeric::{format_rational, parse_rational};

/// Neutron spin `p`, neutron OAM `P_L` and ³He nuclear spin `P_N`
/// polarizations, all helicities along the neutron wavevector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolarizationTriple {
    p: BigRational,
    p_l: BigRational,
    p_n: BigRational,
}

fn check_range(name: &'static str, value: &BigRational) -> Result<()> {
    if value.abs() > BigRational::one() {
        return Err(Error::PolarizationOutOfRange {
            name,
            value: format_rational(value),
        });
    }
    Ok(())
}

impl PolarizationTriple {
    pub fn new(p: BigRational, p_l: BigRational, p_n: BigRational) -> Result<Self> {
        check_range("p", &p)?;
        check_range("P_L", &p_l)?;
        check_range("P_N", &p_n)?;
        Ok(PolarizationTriple { p, p_l, p_n })
    }

    pub fn unpolarized() -> Self {
        PolarizationTriple {
            p: BigRational::zero(),
            p_l: BigRational::zero(),
            p_n: BigRational::zero(),
        }
    }

    /// Parses three rational strings such as `"1/2"`, `"-0.25"`.
    pub fn parse(p: &str, p_l: &str, p_n: &str) -> Result<Self> {
        Self::new(
            parse_rational(p)?,
            parse_rational(p_l)?,
            parse_rational(p_n)?,
        )
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    pub fn p_l(&self) -> &BigRational {
        &self.p_l
    }

    pub fn p_n(&self) -> &BigRational {
        &self.p_n
    }

    /// All three polarizations reversed.
    pub fn flipped(&self) -> Self {
        PolarizationTriple {
            p: -self.p.clone(),
            p_l: -self.p_l.clone(),
            p_n: -self.p_n.clone(),
        }
    }

    pub fn to_f64(&self) -> [f64; 3] {
        use crate::numeric::rational_to_f64 as f;
        [f(&self.p), f(&self.p_l), f(&self.p_n)]
    }

    /// Uniform grid `{-1, -1 + 2/(n-1), ..., 1}^3`, lexicographic in `(p, P_L, P_N)`.
    pub fn grid(points_per_axis: usize) -> Result<Vec<Self>> {
        let axis = axis_points(points_per_axis)?;
        let mut out = Vec::with_capacity(axis.len().pow(3));
        for p in &axis {
            for p_l in &axis {
                for p_n in &axis {
                    out.push(PolarizationTriple {
                        p: p.clone(),
                        p_l: p_l.clone(),
                        p_n: p_n.clone(),
                    });
                }
            }
        }
        Ok(out)
    }
}

/// `n` equally spaced exact rationals from -1 to 1.
pub fn axis_points(n: usize) -> Result<Vec<BigRational>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "grid needs at least 2 points per axis, got {n}"
        )));
    }
    let steps = (n - 1) as i64;
    Ok((0..=steps)
        .map(|i| BigRational::new((2 * i - steps).into(), steps.into()))
        .collect())
}

impl fmt::Display for PolarizationTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(p={}, P_L={}, P_N={})",
            format_rational(&self.p),
            format_rational(&self.p_l),
            format_rational(&self.p_n)
        )
    }
}

/// Occupation probabilities of the magnetic substates of one angular momentum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstateDistribution {
    j: HalfInt,
    entries: Vec<(HalfInt, BigRational)>,
}

impl SubstateDistribution {
    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn entries(&self) -> &[(HalfInt, BigRational)] {
        &self.entries
    }

    /// Probability of projection `m`; zero for unlisted projections.
    pub fn probability(&self, m: HalfInt) -> BigRational {
        self.entries
            .iter()
            .find(|(mm, _)| *mm == m)
            .map(|(_, w)| w.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn total(&self) -> BigRational {
        self.entries.iter().map(|(_, w)| w.clone()).sum()
    }

    /// `(1/j) * sum_m m p(m)`.
    pub fn polarization(&self) -> BigRational {
        let twice_j = BigRational::from_integer(self.j.twice().into());
        let twice_moment: BigRational = self
            .entries
            .iter()
            .map(|(m, w)| w * BigRational::from_integer(m.twice().into()))
            .sum();
        twice_moment / twice_j
    }
}

fn two_state(
    j: HalfInt,
    name: &'static str,
    pol: &BigRational,
    with_zero: bool,
) -> Result<SubstateDistribution> {
    check_range(name, pol)?;
    let half = BigRational::new(1.into(), 2.into());
    let up = (BigRational::one() + pol) * &half;
    let down = (BigRational::one() - pol) * &half;
    let mut entries = vec![(j, up), (-j, down)];
    if with_zero {
        entries.push((HalfInt::ZERO, BigRational::zero()));
    }
    Ok(SubstateDistribution { j, entries })
}

/// Spin-1/2 populations: `m = +1/2 -> (1+P)/2`, `m = -1/2 -> (1-P)/2`.
pub fn spin_half_distribution(polarization: &BigRational) -> Result<SubstateDistribution> {
    two_state(HalfInt::HALF, "spin polarization", polarization, false)
}

/// L=1 OAM populations over `m_L = +1, -1`; `m_L = 0` is never occupied.
pub fn oam_distribution(polarization: &BigRational) -> Result<SubstateDistribution> {
    two_state(HalfInt::ONE, "P_L", polarization, true)
}
