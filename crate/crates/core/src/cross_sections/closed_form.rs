use num_rational::BigRational;
use num_traits::One;

use crate::am_algebra::QuadRational;
use crate::error::Result;
use crate::numeric::{int, ratio};
use crate::polarization::PolarizationTriple;

use super::{CaptureModel, Channel, ChannelCrossSection, Mode};

fn q(a: BigRational, b: BigRational) -> QuadRational {
    QuadRational::new(a, b)
}

/// Ordinary-neutron triplet (`1+`) and singlet (`0+`) cross-sections:
/// `K/4 (3 + P_N p)` and `K/4 (1 - P_N p)`. `P_L` is ignored.
pub fn rose_closed_form(
    channel: Channel,
    pol: &PolarizationTriple,
    model: &CaptureModel,
) -> Result<ChannelCrossSection> {
    model.check_channel(channel, Mode::Ordinary)?;
    let k = model.constant(channel)?;
    let spin_product = pol.p() * pol.p_n();
    let bracket = match channel.j_final.twice() {
        0 => int(1) - spin_product,
        _ => int(3) + spin_product,
    };
    let value = bracket * k / int(4);
    Ok(ChannelCrossSection {
        channel,
        value: QuadRational::from_rational(value),
    })
}

/// L=1 OAM neutron cross-sections into `0-`, `1-`, `2-`, evaluated from the
/// printed brackets, which depend on the polarizations only through the
/// pairwise products `pP_L`, `pP_N` and `P_L P_N`.
pub fn oam_closed_form(
    channel: Channel,
    pol: &PolarizationTriple,
    model: &CaptureModel,
) -> Result<ChannelCrossSection> {
    model.check_channel(channel, Mode::Oam)?;
    let k = model.constant(channel)?;
    let one = BigRational::one();
    let zero = int(0);
    let a = &one - pol.p() * pol.p_l();
    let b = &one - pol.p() * pol.p_n();
    let c = &one - pol.p_l() * pol.p_n();

    let (bracket, divisor) = match channel.j_final.twice() / 2 {
        0 => {
            // 1 - pP_L + pP_N - P_L P_N
            let x = &one - pol.p() * pol.p_l() + pol.p() * pol.p_n() - pol.p_l() * pol.p_n();
            (q(x, zero), 12)
        }
        1 => {
            let term_a = q(int(3), zero.clone()).scale(&a);
            let term_b = q(int(6), int(-4)).scale(&b);
            let term_c = q(int(3), int(4)).scale(&c);
            (term_a + term_b + term_c, 24)
        }
        _ => {
            let x = int(24) - int(5) * &a - int(4) * &b - int(5) * &c;
            (q(x, zero), 24)
        }
    };
    Ok(ChannelCrossSection {
        channel,
        value: bracket.scale(&(k * ratio(1, divisor))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::am_algebra::HalfInt;
    use crate::cross_sections::Parity;

    fn pol(p: BigRational, pl: BigRational, pn: BigRational) -> PolarizationTriple {
        PolarizationTriple::new(p, pl, pn).unwrap()
    }

    fn oam(j: i32) -> Channel {
        Channel::new(HalfInt::integer(j), Parity::Odd)
    }

    fn ord(j: i32) -> Channel {
        Channel::new(HalfInt::integer(j), Parity::Even)
    }

    fn rational(x: &ChannelCrossSection) -> BigRational {
        assert!(x.value.is_rational(), "{}", x.value);
        x.value.rational_part().clone()
    }

    #[test]
    fn rose_examples() {
        let m = CaptureModel::unit(Mode::Ordinary);
        let aligned = pol(int(1), int(0), int(1));
        assert_eq!(
            rational(&rose_closed_form(ord(0), &aligned, &m).unwrap()),
            int(0)
        );
        let unpolarized = PolarizationTriple::unpolarized();
        assert_eq!(
            rational(&rose_closed_form(ord(1), &unpolarized, &m).unwrap()),
            ratio(3, 4)
        );
        let anti = pol(int(1), int(0), int(-1));
        assert_eq!(
            rational(&rose_closed_form(ord(0), &anti, &m).unwrap()),
            ratio(1, 2)
        );
    }

    #[test]
    fn oam_examples() {
        let m = CaptureModel::unit(Mode::Oam);
        let x = pol(int(1), int(1), ratio(1, 2));
        assert_eq!(rational(&oam_closed_form(oam(0), &x, &m).unwrap()), int(0));
        let aligned = pol(int(1), int(1), int(1));
        assert!(oam_closed_form(oam(1), &aligned, &m)
            .unwrap()
            .value
            .is_zero());
        assert_eq!(
            rational(&oam_closed_form(oam(2), &aligned, &m).unwrap()),
            int(1)
        );
        let x = pol(int(1), int(-1), int(1));
        assert_eq!(
            rational(&oam_closed_form(oam(2), &x, &m).unwrap()),
            ratio(1, 6)
        );
    }

    #[test]
    fn constant_scales_linearly() {
        let m = CaptureModel::from_i64(Mode::Oam, &[3, 5, 7]).unwrap();
        let unit = CaptureModel::unit(Mode::Oam);
        let x = pol(ratio(1, 3), ratio(-1, 2), ratio(3, 4));
        for (j, k) in [(0, 3), (1, 5), (2, 7)] {
            let scaled = oam_closed_form(oam(j), &x, &m).unwrap().value;
            let base = oam_closed_form(oam(j), &x, &unit).unwrap().value;
            assert_eq!(scaled, base.scale(&int(k)));
        }
    }

    #[test]
    fn mode_mismatch() {
        let m = CaptureModel::unit(Mode::Ordinary);
        let x = PolarizationTriple::unpolarized();
        assert!(rose_closed_form(oam(1), &x, &m).is_err());
        assert!(oam_closed_form(oam(1), &x, &m).is_err());
        assert!(oam_closed_form(oam(3), &x, &CaptureModel::unit(Mode::Oam)).is_err());
    }
}
