//! ⁴He level scheme around the n + ³He threshold.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::am_algebra::HalfInt;
use crate::cross_sections::{Channel, Mode, Parity};
use crate::error::{Error, Result};

/// The level table as shipped, a versioned TOML document.
pub const LEVEL_TABLE: &str = include_str!("../data/he4_levels.toml");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelRole {
    /// Excitation energy at which thermal n + ³He forms the compound nucleus.
    Entry,
    Level,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub role: LevelRole,
    /// Above the ⁴He ground state. Integer keV so differences stay exact.
    pub energy_kev: u32,
    /// Unset for the threshold entry, which carries no assigned `J^pi`.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_halfint")]
    pub j: Option<HalfInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<Parity>,
    pub isospin_t: u32,
    pub width_note: String,
}

impl LevelRecord {
    pub fn energy_mev(&self) -> f64 {
        f64::from(self.energy_kev) / 1000.0
    }

    pub fn channel(&self) -> Option<Channel> {
        Some(Channel::new(self.j?, self.parity?))
    }

    pub fn label(&self) -> String {
        match self.channel() {
            Some(c) => c.to_string(),
            None => "entry".to_string(),
        }
    }
}

mod opt_halfint {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::am_algebra::HalfInt;

    pub fn serialize<S: Serializer>(j: &Option<HalfInt>, s: S) -> Result<S::Ok, S::Error> {
        match j {
            Some(j) => s.collect_str(j),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<HalfInt>, D::Error> {
        let raw: Option<String> = Option::deserialize(d)?;
        raw.map(|s| s.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[derive(Debug, Deserialize)]
struct LevelTable {
    version: u32,
    level: Vec<LevelRecord>,
}

/// Parses a level table document.
pub fn parse_levels(text: &str) -> Result<(u32, Vec<LevelRecord>)> {
    let table: LevelTable = toml::from_str(text)?;
    for record in &table.level {
        if record.energy_kev == 0 {
            return Err(Error::InvalidInput(
                "excited-state energy must be positive".into(),
            ));
        }
        if record.role == LevelRole::Level && record.channel().is_none() {
            return Err(Error::InvalidInput(format!(
                "level at {} keV lacks J or parity",
                record.energy_kev
            )));
        }
    }
    if table
        .level
        .iter()
        .filter(|r| r.role == LevelRole::Entry)
        .count()
        != 1
    {
        return Err(Error::InvalidInput(
            "level table needs exactly one entry record".into(),
        ));
    }
    Ok((table.version, table.level))
}

fn table() -> &'static (u32, Vec<LevelRecord>) {
    static TABLE: OnceLock<(u32, Vec<LevelRecord>)> = OnceLock::new();
    TABLE.get_or_init(|| parse_levels(LEVEL_TABLE).expect("embedded level table is valid"))
}

pub fn level_table_version() -> u32 {
    table().0
}

/// The threshold entry followed by the five levels, in table order.
pub fn builtin_levels() -> Vec<LevelRecord> {
    table().1.clone()
}

pub fn entry_level() -> &'static LevelRecord {
    table()
        .1
        .iter()
        .find(|r| r.role == LevelRole::Entry)
        .expect("validated on load")
}

/// Entry energy minus the nearest level with the channel's `J^pi`, in keV.
pub fn channel_detuning_kev(channel: Channel) -> Result<i64> {
    let entry = i64::from(entry_level().energy_kev);
    table()
        .1
        .iter()
        .filter(|r| r.channel() == Some(channel))
        .map(|r| entry - i64::from(r.energy_kev))
        .min_by_key(|d| d.abs())
        .ok_or_else(|| Error::LevelNotFound(channel.to_string()))
}

/// Signed detuning in MeV; positive when the entry lies above the level.
pub fn channel_detuning(channel: Channel) -> Result<f64> {
    channel_detuning_kev(channel).map(|kev| kev as f64 / 1000.0)
}

/// Channels allowed by parity: `0+, 1+` for ordinary neutrons,
/// `0-, 1-, 2-` once one unit of orbital angular momentum is added.
pub fn parity_selection(mode: Mode) -> Vec<Channel> {
    mode.channels()
}
