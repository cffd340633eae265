//! CSV and JSON file formats of the toolkit.
//!
//! * settings: `p,P_L,P_N,exposure,depth`, polarizations as exact rationals
//! * counts: `setting_id,capture,transmitted`, optionally followed by one
//!   `capture_<J^pi>` column per channel
//! * fit output: JSON `{K_hat, covariance, residual_norm, ...}`

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::cross_sections::Mode;
use crate::error::{Error, Result};
use crate::numeric::format_rational;
use crate::polarization::PolarizationTriple;

use super::{CountRecord, FitResult, MeasurementSetting};

pub const SETTINGS_HEADER: [&str; 5] = ["p", "P_L", "P_N", "exposure", "depth"];
pub const COUNTS_HEADER: [&str; 3] = ["setting_id", "capture", "transmitted"];

#[derive(Serialize, Deserialize)]
struct SettingRow {
    p: String,
    #[serde(rename = "P_L")]
    p_l: String,
    #[serde(rename = "P_N")]
    p_n: String,
    exposure: f64,
    depth: f64,
}

pub fn read_settings<R: Read>(reader: R) -> Result<Vec<MeasurementSetting>> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != SETTINGS_HEADER {
        return Err(Error::InvalidInput(format!(
            "settings header must be {}, got {}",
            SETTINGS_HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    csv.deserialize::<SettingRow>()
        .map(|row| {
            let row = row?;
            let pol = PolarizationTriple::parse(&row.p, &row.p_l, &row.p_n)?;
            MeasurementSetting::new(pol, row.exposure, row.depth)
        })
        .collect()
}

pub fn write_settings<W: Write>(writer: W, settings: &[MeasurementSetting]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for s in settings {
        csv.serialize(SettingRow {
            p: format_rational(s.pol.p()),
            p_l: format_rational(s.pol.p_l()),
            p_n: format_rational(s.pol.p_n()),
            exposure: s.exposure,
            depth: s.depth,
        })?;
    }
    csv.flush()?;
    Ok(())
}

/// Column names of the per-channel capture split.
pub fn channel_columns(mode: Mode) -> Vec<String> {
    mode.channels()
        .iter()
        .map(|c| format!("capture_{c}"))
        .collect()
}

/// Reads counts and joins them to `settings` by `setting_id`. Channel
/// columns, when present, must cover every channel of `mode`.
pub fn read_counts<R: Read>(
    reader: R,
    settings: &[MeasurementSetting],
    mode: Mode,
) -> Result<Vec<CountRecord>> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = csv.headers()?.iter().map(str::to_string).collect();
    if headers.len() < 3 || headers[..3] != COUNTS_HEADER {
        return Err(Error::InvalidInput(format!(
            "counts header must start with {}",
            COUNTS_HEADER.join(",")
        )));
    }
    let extra = &headers[3..];
    let wanted = channel_columns(mode);
    let resolved = match extra.len() {
        0 => false,
        _ if extra == wanted.as_slice() => true,
        _ => {
            return Err(Error::InvalidInput(format!(
                "channel columns for {mode} mode must be {}",
                wanted.join(",")
            )))
        }
    };

    let field = |record: &csv::StringRecord, i: usize, line: usize| -> Result<u64> {
        record[i].parse::<u64>().map_err(|_| Error::Parse {
            what: "nonnegative integer count",
            input: format!("line {line}, column {}: {}", headers[i], &record[i]),
        })
    };

    let mut out = Vec::new();
    for (n, record) in csv.records().enumerate() {
        let record = record?;
        let line = n + 2;
        let id = field(&record, 0, line)? as usize;
        let setting = settings
            .get(id)
            .ok_or_else(|| {
                Error::InvalidInput(format!("line {line}: setting_id {id} has no setting"))
            })?
            .clone();
        let capture_counts = field(&record, 1, line)?;
        let channel_captures = if resolved {
            (3..headers.len())
                .map(|i| field(&record, i, line))
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        if resolved && channel_captures.iter().sum::<u64>() != capture_counts {
            return Err(Error::InvalidInput(format!(
                "line {line}: channel captures do not add up to capture"
            )));
        }
        out.push(CountRecord {
            setting_id: id,
            setting,
            capture_counts,
            transmitted_counts: field(&record, 2, line)?,
            channel_captures,
        });
    }
    Ok(out)
}

/// Writes counts; channel columns are added when `resolved` is set.
pub fn write_counts<W: Write>(
    writer: W,
    records: &[CountRecord],
    mode: Mode,
    resolved: bool,
) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = COUNTS_HEADER.iter().map(|s| s.to_string()).collect();
    if resolved {
        header.extend(channel_columns(mode));
    }
    csv.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.setting_id.to_string(),
            r.capture_counts.to_string(),
            r.transmitted_counts.to_string(),
        ];
        if resolved {
            if r.channel_captures.len() != mode.channels().len() {
                return Err(Error::InvalidInput(format!(
                    "record {} has no per-channel split",
                    r.setting_id
                )));
            }
            row.extend(r.channel_captures.iter().map(u64::to_string));
        }
        csv.write_record(&row)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_fit<W: Write>(writer: W, fit: &FitResult) -> Result<()> {
    serde_json::to_writer_pretty(writer, fit)?;
    Ok(())
}

pub fn read_fit<R: Read>(reader: R) -> Result<FitResult> {
    Ok(serde_json::from_reader(reader)?)
}
