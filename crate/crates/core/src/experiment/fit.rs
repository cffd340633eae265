use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cross_sections::{Channel, Mode};
use crate::error::{Error, Result};

use super::{design_row, nnls, CountRecord, Observation};

/// Whether captures are attributed to channels (distinguishable decay
/// products) or only counted in total.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMode {
    #[default]
    Summed,
    Resolved,
}

/// Weights of the least-squares residuals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// `1 / max(count, 1)` from the observed counts.
    #[default]
    Counts,
    /// `1 / max(mu, 1)` from the current model prediction, refreshed every
    /// iteration. The fixed point is the Poisson maximum-likelihood estimate,
    /// which stays unbiased when many cells hold only a few counts.
    Model,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FitOptions {
    pub channels: FitMode,
    pub weighting: Weighting,
}

impl FitOptions {
    pub fn new(channels: FitMode, weighting: Weighting) -> Self {
        FitOptions {
            channels,
            weighting,
        }
    }
}

impl From<FitMode> for FitOptions {
    fn from(channels: FitMode) -> Self {
        FitOptions {
            channels,
            weighting: Weighting::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    #[serde(rename = "K_hat")]
    pub k_hat: BTreeMap<Channel, f64>,
    /// Rows and columns follow `channels`.
    pub covariance: Vec<Vec<f64>>,
    pub residual_norm: f64,
    pub channels: Vec<Channel>,
    pub iterations: usize,
}

impl FitResult {
    pub fn estimates(&self) -> Vec<f64> {
        self.channels.iter().map(|c| self.k_hat[c]).collect()
    }

    pub fn std_errors(&self) -> Vec<f64> {
        (0..self.channels.len())
            .map(|i| self.covariance[i][i].max(0.0).sqrt())
            .collect()
    }
}

const MAX_ITERATIONS: usize = 200;
const RANK_TOLERANCE: f64 = 1e-10;

struct Row {
    design: Vec<f64>,
    exposure: f64,
    depth: f64,
    /// `None` for the channel-summed capture count.
    channel: Option<usize>,
    observed: f64,
}

impl Row {
    /// Expected counts and their gradient with respect to `K`.
    fn model(&self, k: &[f64]) -> (f64, Vec<f64>) {
        let s: f64 = self.design.iter().zip(k).map(|(d, k)| d * k).sum();
        let x = self.depth * s;
        match self.channel {
            None => {
                let mean = -self.exposure * (-x).exp_m1();
                let slope = self.exposure * self.depth * (-x).exp();
                (mean, self.design.iter().map(|d| slope * d).collect())
            }
            Some(c) => {
                // g(s) = (1 - exp(-d s)) / s and its derivative
                let d = self.depth;
                let (g, dg) = if x.abs() < 1e-4 {
                    (
                        d * (1.0 - x / 2.0 + x * x / 6.0),
                        d * d * (-0.5 + x / 3.0 - x * x / 8.0),
                    )
                } else {
                    let absorbed = -(-x).exp_m1();
                    (absorbed / s, (x * (-x).exp() - absorbed) / (s * s))
                };
                let dc = self.design[c];
                let mean = self.exposure * dc * k[c] * g;
                let grad = self
                    .design
                    .iter()
                    .enumerate()
                    .map(|(j, dj)| {
                        let direct = if j == c { g } else { 0.0 };
                        self.exposure * dc * (direct + k[c] * dg * dj)
                    })
                    .collect();
                (mean, grad)
            }
        }
    }
}

fn weights(rows: &[Row], k: &[f64], weighting: Weighting) -> Vec<f64> {
    rows.iter()
        .map(|r| match weighting {
            Weighting::Counts => 1.0 / r.observed.max(1.0),
            Weighting::Model => 1.0 / r.model(k).0.max(1.0),
        })
        .collect()
}

fn chi_square(rows: &[Row], k: &[f64], w: &[f64]) -> f64 {
    rows.iter()
        .zip(w)
        .map(|(r, w)| {
            let residual = r.observed - r.model(k).0;
            w * residual * residual
        })
        .sum()
}

/// Weighted system `(W^1/2 J, W^1/2 (y - mu + J k))` linearized at `k`.
fn linearize(rows: &[Row], k: &[f64], weights: &[f64]) -> (DMatrix<f64>, DVector<f64>) {
    let m = k.len();
    let mut a = DMatrix::zeros(rows.len(), m);
    let mut b = DVector::zeros(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let (mean, grad) = r.model(k);
        let w = weights[i].sqrt();
        let jk: f64 = grad.iter().zip(k).map(|(g, k)| g * k).sum();
        for j in 0..m {
            a[(i, j)] = w * grad[j];
        }
        b[i] = w * (r.observed - mean + jk);
    }
    (a, b)
}

fn check_identifiable(design: &DMatrix<f64>, channels: &[Channel]) -> Result<()> {
    let svd = design.clone().svd(false, true);
    let sv = &svd.singular_values;
    let (largest, smallest, idx) =
        sv.iter()
            .enumerate()
            .fold((0.0f64, f64::INFINITY, 0usize), |(hi, lo, idx), (i, &s)| {
                (
                    hi.max(s),
                    if s < lo { s } else { lo },
                    if s < lo { i } else { idx },
                )
            });
    if design.nrows() >= design.ncols() && smallest > RANK_TOLERANCE * largest {
        return Ok(());
    }
    let v_t = svd.v_t.expect("requested V^T");
    let null = if design.nrows() < design.ncols() {
        // Wide design: pick any direction orthogonal to the row space.
        let full = design.transpose() * design;
        let eig = full.symmetric_eigen();
        let i = eig.eigenvalues.imin();
        eig.eigenvectors.column(i).into_owned()
    } else {
        v_t.row(idx).transpose()
    };
    let terms: Vec<String> = null
        .iter()
        .zip(channels)
        .filter(|(v, _)| v.abs() > 1e-9)
        .map(|(v, c)| format!("{v:+.4}*K({c})"))
        .collect();
    Err(Error::DegenerateDesign(terms.join(" ")))
}

/// Fits the nuclear constants to counting records.
pub fn fit_k(
    records: &[CountRecord],
    mode: Mode,
    options: impl Into<FitOptions>,
) -> Result<FitResult> {
    let observations: Vec<Observation> = records.iter().map(Observation::from).collect();
    fit_observations(&observations, mode, options)
}

/// Weighted nonnegative least squares for `K >= 0`, by default with weights
/// `1 / max(count, 1)`, solved by Gauss-Newton steps that are each a
/// Lawson-Hanson NNLS problem. The covariance is the inverse of the weighted
/// normal matrix over the components not held at zero.
pub fn fit_observations(
    observations: &[Observation],
    mode: Mode,
    options: impl Into<FitOptions>,
) -> Result<FitResult> {
    let FitOptions {
        channels: fit_mode,
        weighting,
    } = options.into();
    if observations.is_empty() {
        return Err(Error::InvalidInput("no records to fit".into()));
    }
    let channels = mode.channels();
    let m = channels.len();

    let mut design_rows = Vec::with_capacity(observations.len());
    let mut rows = Vec::new();
    for obs in observations {
        let design = design_row(&obs.setting.pol, mode)?;
        design_rows.extend_from_slice(&design);
        let make = |channel, observed| Row {
            design: design.clone(),
            exposure: obs.setting.exposure,
            depth: obs.setting.depth,
            channel,
            observed,
        };
        match fit_mode {
            FitMode::Summed => rows.push(make(None, obs.captures)),
            FitMode::Resolved => {
                let split = obs.channel_captures.as_ref().ok_or_else(|| {
                    Error::InvalidInput(
                        "channel-resolved fit needs per-channel capture counts".into(),
                    )
                })?;
                if split.len() != m {
                    return Err(Error::InvalidInput(format!(
                        "expected {m} channel counts, got {}",
                        split.len()
                    )));
                }
                for (c, &count) in split.iter().enumerate() {
                    rows.push(make(Some(c), count));
                }
            }
        }
    }
    let design = DMatrix::from_row_slice(observations.len(), m, &design_rows);
    check_identifiable(&design, &channels)?;

    // Thin-cell start: counts ~ E d D K.
    let mut thin_a = DMatrix::zeros(rows.len(), m);
    let mut thin_b = DVector::zeros(rows.len());
    let count_weights = weights(&rows, &[], Weighting::Counts);
    for (i, r) in rows.iter().enumerate() {
        let w = count_weights[i].sqrt();
        for j in 0..m {
            let used = r.channel.is_none_or(|c| c == j);
            if used {
                thin_a[(i, j)] = w * r.exposure * r.depth * r.design[j];
            }
        }
        thin_b[i] = w * r.observed;
    }
    let mut k: Vec<f64> = nnls(&thin_a, &thin_b).iter().copied().collect();

    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let w = weights(&rows, &k, weighting);
        let chi2 = chi_square(&rows, &k, &w);
        let (a, b) = linearize(&rows, &k, &w);
        let target: Vec<f64> = nnls(&a, &b).iter().copied().collect();
        let step: Vec<f64> = target.iter().zip(&k).map(|(t, k)| t - k).collect();

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = k
                .iter()
                .zip(&step)
                .map(|(k, s)| (k + t * s).max(0.0))
                .collect();
            if chi_square(&rows, &trial, &w) <= chi2 {
                accepted = Some(trial);
                break;
            }
            t *= 0.5;
        }
        let Some(next) = accepted else {
            break;
        };
        let scale = k.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let moved = next
            .iter()
            .zip(&k)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        k = next;
        if moved <= 1e-14 * scale {
            break;
        }
    }

    let w = weights(&rows, &k, weighting);
    let chi2 = chi_square(&rows, &k, &w);
    let (a, _) = linearize(&rows, &k, &w);
    let active: Vec<usize> = (0..m).filter(|&j| k[j] > 0.0).collect();
    let mut covariance = vec![vec![0.0; m]; m];
    if !active.is_empty() {
        let mut sub = DMatrix::zeros(a.nrows(), active.len());
        for (col, &j) in active.iter().enumerate() {
            sub.set_column(col, &a.column(j));
        }
        let normal = sub.transpose() * &sub;
        let inverse = normal
            .try_inverse()
            .ok_or_else(|| Error::DegenerateDesign("weighted normal matrix is singular".into()))?;
        for (x, &i) in active.iter().enumerate() {
            for (y, &j) in active.iter().enumerate() {
                covariance[i][j] = inverse[(x, y)];
            }
        }
    }

    Ok(FitResult {
        k_hat: channels.iter().copied().zip(k.iter().copied()).collect(),
        covariance,
        residual_norm: chi2.sqrt(),
        channels,
        iterations,
    })
}
