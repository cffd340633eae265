//! Capture cross-sections per compound-nucleus channel.
//!
//! Two independent routes are provided for each neutron mode: the printed
//! closed-form brackets and a brute-force sum over magnetic substates built
//! on [`cg`](crate::am_algebra::cg). Both are reachable by name through
//! [`MethodRegistry`].

mod closed_form;
mod oracle;
mod reconcile;
mod registry;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::am_algebra::{HalfInt, QuadRational};
use crate::error::{Error, Result};
use crate::numeric::format_rational;
use crate::polarization::PolarizationTriple;

pub use closed_form::{oam_closed_form, rose_closed_form};
pub use oracle::{oam_oracle, rose_oracle};
pub use reconcile::{
    reconcile, Claim, ClaimKind, ClaimVerdict, Discrepancy, OracleProperties, PolarizationProduct,
    ReconciliationReport,
};
pub use registry::{builtin_methods, ClosedForm, CrossSectionMethod, MethodRegistry, Oracle};

/// Ordinary (spin-only) neutrons or neutrons carrying one unit of OAM.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ordinary,
    Oam,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Ordinary, Mode::Oam];

    pub fn parity(self) -> Parity {
        match self {
            Mode::Ordinary => Parity::Even,
            Mode::Oam => Parity::Odd,
        }
    }

    /// Compound-nucleus channels reachable in this mode, ordered by `J`.
    pub fn channels(self) -> Vec<Channel> {
        let max_j = match self {
            Mode::Ordinary => 1,
            Mode::Oam => 2,
        };
        (0..=max_j)
            .map(|j| Channel::new(HalfInt::integer(j), self.parity()))
            .collect()
    }

    pub fn contains(self, channel: Channel) -> bool {
        channel.parity == self.parity() && self.channels().contains(&channel)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Ordinary => "ordinary",
            Mode::Oam => "oam",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ordinary" => Ok(Mode::Ordinary),
            "oam" => Ok(Mode::Oam),
            _ => Err(Error::Parse {
                what: "mode (ordinary|oam)",
                input: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn symbol(self) -> char {
        match self {
            Parity::Even => '+',
            Parity::Odd => '-',
        }
    }
}

/// A compound-nucleus channel `J^pi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Channel {
    pub j_final: HalfInt,
    pub parity: Parity,
}

impl Channel {
    pub const fn new(j_final: HalfInt, parity: Parity) -> Self {
        Channel { j_final, parity }
    }

    pub fn mode(self) -> Mode {
        match self.parity {
            Parity::Even => Mode::Ordinary,
            Parity::Odd => Mode::Oam,
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.j_final, self.parity.symbol())
    }
}

impl FromStr for Channel {
    type Err = Error;

    /// `0+`, `1-`, `2-`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "channel (e.g. 0+, 2-)",
            input: s.to_string(),
        };
        let s = s.trim();
        let parity = match s.chars().last() {
            Some('+') => Parity::Even,
            Some('-') => Parity::Odd,
            _ => return Err(bad()),
        };
        let j: HalfInt = s[..s.len() - 1].parse().map_err(|_| bad())?;
        if j.twice() < 0 {
            return Err(bad());
        }
        Ok(Channel::new(j, parity))
    }
}

impl Serialize for Channel {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Channel {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Nuclear constants `K` per channel, in arbitrary units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaptureModel {
    mode: Mode,
    constants: BTreeMap<Channel, BigRational>,
}

impl CaptureModel {
    /// `K = 1` on every channel: relative cross-sections.
    pub fn unit(mode: Mode) -> Self {
        CaptureModel {
            mode,
            constants: mode
                .channels()
                .into_iter()
                .map(|c| (c, BigRational::one()))
                .collect(),
        }
    }

    /// Constants listed in channel order (`J` ascending).
    pub fn new(mode: Mode, constants: Vec<BigRational>) -> Result<Self> {
        let channels = mode.channels();
        if constants.len() != channels.len() {
            return Err(Error::InvalidInput(format!(
                "{mode} mode needs {} nuclear constants, got {}",
                channels.len(),
                constants.len()
            )));
        }
        for (c, k) in channels.iter().zip(&constants) {
            if k.is_negative() {
                return Err(Error::NegativeConstant {
                    channel: c.to_string(),
                    value: format_rational(k),
                });
            }
        }
        Ok(CaptureModel {
            mode,
            constants: channels.into_iter().zip(constants).collect(),
        })
    }

    pub fn from_i64(mode: Mode, constants: &[i64]) -> Result<Self> {
        Self::new(
            mode,
            constants
                .iter()
                .map(|&k| BigRational::from_integer(k.into()))
                .collect(),
        )
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn channels(&self) -> Vec<Channel> {
        self.mode.channels()
    }

    pub fn constant(&self, channel: Channel) -> Result<&BigRational> {
        self.constants
            .get(&channel)
            .ok_or_else(|| Error::MissingConstant(channel.to_string()))
    }

    pub fn constants(&self) -> impl Iterator<Item = (Channel, &BigRational)> {
        self.constants.iter().map(|(c, k)| (*c, k))
    }

    pub fn is_all_zero(&self) -> bool {
        self.constants.values().all(Zero::is_zero)
    }

    pub(crate) fn check_channel(&self, channel: Channel, expected: Mode) -> Result<()> {
        if self.mode != expected || !expected.contains(channel) {
            return Err(Error::ModeMismatch {
                channel: channel.to_string(),
                mode: self.mode.to_string(),
            });
        }
        Ok(())
    }
}

/// Cross-section of one channel, same arbitrary units as `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelCrossSection {
    pub channel: Channel,
    pub value: QuadRational,
}

/// Sum of the closed-form channel cross-sections.
pub fn total_cross_section(pol: &PolarizationTriple, model: &CaptureModel) -> Result<QuadRational> {
    channel_cross_sections(pol, model).map(|xs| xs.into_iter().map(|x| x.value).sum())
}

/// Closed-form cross-sections for every channel of the model's mode.
pub fn channel_cross_sections(
    pol: &PolarizationTriple,
    model: &CaptureModel,
) -> Result<Vec<ChannelCrossSection>> {
    model
        .channels()
        .into_iter()
        .map(|c| match model.mode() {
            Mode::Ordinary => rose_closed_form(c, pol, model),
            Mode::Oam => oam_closed_form(c, pol, model),
        })
        .collect()
}

/// Channel fractions `sigma_c / sigma_total`; `None` when the total vanishes.
pub fn channel_fractions(
    pol: &PolarizationTriple,
    model: &CaptureModel,
) -> Result<Option<Vec<QuadRational>>> {
    let xs = channel_cross_sections(pol, model)?;
    let total: QuadRational = xs.iter().map(|x| x.value.clone()).sum();
    if total.is_zero() {
        return Ok(None);
    }
    xs.iter()
        .map(|x| x.value.checked_div(&total))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}
