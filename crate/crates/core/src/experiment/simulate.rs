use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::cross_sections::CaptureModel;
use crate::error::Result;
use crate::numeric::rational_to_f64;

use super::{design_row, CountRecord, MeasurementSetting, Observation};

/// Mean counts of one setting under the attenuation model.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpectedRates {
    pub channel_captures: Vec<f64>,
    pub captures: f64,
    pub transmitted: f64,
}

/// Channel capture means `E (1 - exp(-d s)) D_c K_c / s` with `s = sum_c D_c K_c`.
pub(crate) fn channel_means(row: &[f64], k: &[f64], exposure: f64, depth: f64) -> (Vec<f64>, f64) {
    let partial: Vec<f64> = row.iter().zip(k).map(|(d, k)| d * k).collect();
    let total: f64 = partial.iter().sum();
    let transmitted = exposure * (-depth * total).exp();
    if total <= 0.0 {
        return (vec![0.0; row.len()], transmitted);
    }
    let absorbed = -exposure * (-depth * total).exp_m1();
    (
        partial.iter().map(|s| absorbed * s / total).collect(),
        transmitted,
    )
}

fn constants_f64(model: &CaptureModel) -> Vec<f64> {
    model.constants().map(|(_, k)| rational_to_f64(k)).collect()
}

pub fn expected_rates(setting: &MeasurementSetting, model: &CaptureModel) -> Result<ExpectedRates> {
    let row = design_row(&setting.pol, model.mode())?;
    let (channel_captures, transmitted) =
        channel_means(&row, &constants_f64(model), setting.exposure, setting.depth);
    Ok(ExpectedRates {
        captures: channel_captures.iter().sum(),
        channel_captures,
        transmitted,
    })
}

/// Noiseless observations: every count equals its mean.
pub fn expected_observations(
    settings: &[MeasurementSetting],
    model: &CaptureModel,
) -> Result<Vec<Observation>> {
    settings
        .iter()
        .map(|s| {
            let rates = expected_rates(s, model)?;
            Ok(Observation {
                setting: s.clone(),
                captures: rates.captures,
                channel_captures: Some(rates.channel_captures),
            })
        })
        .collect()
}

fn poisson(mean: f64, rng: &mut ChaCha8Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let sample: f64 = Poisson::new(mean)
        .expect("finite positive mean")
        .sample(rng);
    sample as u64
}

/// Poisson counting runs, one ChaCha8 stream per setting index.
///
/// Channel captures are drawn independently, which is the same as a Poisson
/// total split multinomially in proportion to the channel cross-sections.
/// Output depends only on `(seed, settings)`, not on thread scheduling.
pub fn simulate_counts(
    settings: &[MeasurementSetting],
    model: &CaptureModel,
    seed: u64,
) -> Result<Vec<CountRecord>> {
    settings
        .par_iter()
        .enumerate()
        .map(|(i, setting)| {
            let rates = expected_rates(setting, model)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let channel_captures: Vec<u64> = rates
                .channel_captures
                .iter()
                .map(|&m| poisson(m, &mut rng))
                .collect();
            let transmitted_counts = poisson(rates.transmitted, &mut rng);
            Ok(CountRecord {
                setting_id: i,
                setting: setting.clone(),
                capture_counts: channel_captures.iter().sum(),
                transmitted_counts,
                channel_captures,
            })
        })
        .collect()
}
