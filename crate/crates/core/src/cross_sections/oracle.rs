use num_rational::BigRational;
use num_traits::Zero;

use crate::am_algebra::{cg, HalfInt, QuadRational, SqrtRational};
use crate::error::Result;
use crate::polarization::{oam_distribution, spin_half_distribution, PolarizationTriple};

use super::{CaptureModel, Channel, ChannelCrossSection, Mode};

/// CG coefficient, taken as zero when a `(j, m)` label does not name a state.
fn amplitude(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<SqrtRational> {
    if m.twice().abs() > j.twice() {
        return Ok(SqrtRational::zero());
    }
    cg(j1, m1, j2, m2, j, m)
}

/// Ordinary-neutron cross-section summed over ³He (`m_N`) and neutron (`mu`)
/// spin projections, weighted by their populations.
pub fn rose_oracle(
    channel: Channel,
    pol: &PolarizationTriple,
    model: &CaptureModel,
) -> Result<ChannelCrossSection> {
    model.check_channel(channel, Mode::Ordinary)?;
    let k = model.constant(channel)?;
    let nucleus = spin_half_distribution(pol.p_n())?;
    let neutron = spin_half_distribution(pol.p())?;
    let half = HalfInt::HALF;

    let mut sum = BigRational::zero();
    for (m_n, w_n) in nucleus.entries() {
        for (mu, w_mu) in neutron.entries() {
            let m_final = *m_n + *mu;
            let c = amplitude(half, *m_n, half, *mu, channel.j_final, m_final)?;
            sum += w_n * w_mu * c.square();
        }
    }
    Ok(ChannelCrossSection {
        channel,
        value: QuadRational::from_rational(sum * k),
    })
}

/// OAM-neutron cross-section from the full substate sum.
///
/// The neutron OAM (`j_L = 1`, `m_L`) and spin (`mu`) first couple to
/// `j' in {1/2, 3/2}`, which then couples with the ³He spin (`m_N`) to the
/// channel `J''`. Amplitudes through both `j'` paths add coherently before
/// squaring, so `J'' = 1` picks up cross terms in Q(sqrt 2).
pub fn oam_oracle(
    channel: Channel,
    pol: &PolarizationTriple,
    model: &CaptureModel,
) -> Result<ChannelCrossSection> {
    model.check_channel(channel, Mode::Oam)?;
    let k = model.constant(channel)?;
    let nucleus = spin_half_distribution(pol.p_n())?;
    let orbital = oam_distribution(pol.p_l())?;
    let neutron = spin_half_distribution(pol.p())?;
    let half = HalfInt::HALF;
    let intermediate = [HalfInt::from_twice(1), HalfInt::from_twice(3)];

    let mut sum = QuadRational::zero();
    for (m_n, w_n) in nucleus.entries() {
        for (m_l, w_l) in orbital.entries() {
            for (mu, w_mu) in neutron.entries() {
                let weight = w_n * w_l * w_mu;
                if weight.is_zero() {
                    continue;
                }
                let m_prime = *m_l + *mu;
                let m_final = m_prime + *m_n;

                let mut paths = Vec::with_capacity(intermediate.len());
                for &j_prime in &intermediate {
                    let first = amplitude(HalfInt::ONE, *m_l, half, *mu, j_prime, m_prime)?;
                    if first.is_zero() {
                        continue;
                    }
                    let second = amplitude(j_prime, m_prime, half, *m_n, channel.j_final, m_final)?;
                    let path = &second * &first;
                    if !path.is_zero() {
                        paths.push(path);
                    }
                }

                // |sum_x x|^2 = sum_{x,y} x y, each product landing in Q(sqrt 2)
                let mut squared = QuadRational::zero();
                for x in &paths {
                    for y in &paths {
                        squared += &x.sqrt_product(y)?;
                    }
                }
                sum += &squared.scale(&weight);
            }
        }
    }
    Ok(ChannelCrossSection {
        channel,
        value: sum.scale(k),
    })
}
