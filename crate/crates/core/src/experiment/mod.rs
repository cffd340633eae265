//! Experiment design and analysis on top of the cross-section model:
//! design matrices, simulated counting runs, recovery of the nuclear
//! constants, and polarization sweeps.
//!
//! Measurement model: a setting sends `exposure` neutrons through a ³He
//! cell of optical-depth coefficient `depth`, so the transmission is
//! `T = exp(-depth * sigma_total)` and the captures into channel `c` have
//! mean `exposure * (1 - T) * sigma_c / sigma_total`. Counts are Poisson.

mod design;
mod fit;
pub mod io;
mod nnls;
mod simulate;
mod sweep;

use crate::error::{Error, Result};
use crate::polarization::PolarizationTriple;

pub use design::{design_matrix, design_row};
pub use fit::{fit_k, fit_observations, FitMode, FitOptions, FitResult, Weighting};
pub use nnls::nnls;
pub use simulate::{expected_observations, expected_rates, simulate_counts, ExpectedRates};
pub use sweep::{discriminability_sweep, flip_candidates, SweepRow};

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSetting {
    pub pol: PolarizationTriple,
    /// Incident neutrons, arbitrary time units times flux.
    pub exposure: f64,
    /// Optical depth per unit cross-section (areal density times scale).
    pub depth: f64,
}

impl MeasurementSetting {
    pub fn new(pol: PolarizationTriple, exposure: f64, depth: f64) -> Result<Self> {
        if !(exposure > 0.0 && exposure.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "exposure must be positive, got {exposure}"
            )));
        }
        if !(depth > 0.0 && depth.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "depth must be positive, got {depth}"
            )));
        }
        Ok(MeasurementSetting {
            pol,
            exposure,
            depth,
        })
    }

    /// One setting per point of the uniform polarization grid.
    pub fn grid(points_per_axis: usize, exposure: f64, depth: f64) -> Result<Vec<Self>> {
        PolarizationTriple::grid(points_per_axis)?
            .into_iter()
            .map(|pol| Self::new(pol, exposure, depth))
            .collect()
    }
}

/// Outcome of one counting run.
#[derive(Clone, Debug, PartialEq)]
pub struct CountRecord {
    pub setting_id: usize,
    pub setting: MeasurementSetting,
    pub capture_counts: u64,
    pub transmitted_counts: u64,
    /// Per-channel split of `capture_counts`, when decay products identify the
    /// channel. Empty otherwise.
    pub channel_captures: Vec<u64>,
}

/// Counts as real numbers, so noiseless expectations can be fitted directly.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub setting: MeasurementSetting,
    pub captures: f64,
    pub channel_captures: Option<Vec<f64>>,
}

impl From<&CountRecord> for Observation {
    fn from(r: &CountRecord) -> Self {
        Observation {
            setting: r.setting.clone(),
            captures: r.capture_counts as f64,
            channel_captures: (!r.channel_captures.is_empty())
                .then(|| r.channel_captures.iter().map(|&c| c as f64).collect()),
        }
    }
}
