//! Adjudication of the closed forms against the substate-sum oracle.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::am_algebra::{HalfInt, QuadRational};
use crate::error::Result;
use crate::numeric::{format_rational, int};
use crate::polarization::{axis_points, PolarizationTriple};

use super::{builtin_methods, CaptureModel, Channel, Mode, Parity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PolarizationProduct {
    #[serde(rename = "pP_L")]
    SpinOrbit,
    #[serde(rename = "pP_N")]
    SpinNucleus,
    #[serde(rename = "P_LP_N")]
    OrbitNucleus,
}

impl PolarizationProduct {
    fn eval(self, pol: &PolarizationTriple) -> BigRational {
        match self {
            PolarizationProduct::SpinOrbit => pol.p() * pol.p_l(),
            PolarizationProduct::SpinNucleus => pol.p() * pol.p_n(),
            PolarizationProduct::OrbitNucleus => pol.p_l() * pol.p_n(),
        }
    }
}

impl fmt::Display for PolarizationProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolarizationProduct::SpinOrbit => "pP_L",
            PolarizationProduct::SpinNucleus => "pP_N",
            PolarizationProduct::OrbitNucleus => "P_LP_N",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimKind {
    ZeroAt,
    MinimumAt,
    MaximumAt,
    NeverZero,
}

/// A statement about a channel's cross-section, checked against the oracle.
#[derive(Clone, Debug)]
pub struct Claim {
    pub channel: Channel,
    pub kind: ClaimKind,
    pub condition: Vec<(PolarizationProduct, i64)>,
}

impl Claim {
    fn new(
        j: i32,
        parity: Parity,
        kind: ClaimKind,
        condition: &[(PolarizationProduct, i64)],
    ) -> Self {
        Claim {
            channel: Channel::new(HalfInt::integer(j), parity),
            kind,
            condition: condition.to_vec(),
        }
    }

    fn matches(&self, pol: &PolarizationTriple) -> bool {
        self.condition
            .iter()
            .all(|(product, v)| product.eval(pol) == int(*v))
    }

    fn condition_text(&self) -> String {
        if self.condition.is_empty() {
            return "anywhere".into();
        }
        self.condition
            .iter()
            .map(|(product, v)| format!("{product}={v}"))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Zero loci and extremum locations stated for the closed forms.
    pub fn published() -> Vec<Claim> {
        use ClaimKind::*;
        use PolarizationProduct::*;
        let all_aligned = [(SpinOrbit, 1), (SpinNucleus, 1), (OrbitNucleus, 1)];
        let orbit_reversed = [(SpinOrbit, -1), (OrbitNucleus, -1)];
        vec![
            Claim::new(0, Parity::Even, ZeroAt, &[(SpinNucleus, 1)]),
            Claim::new(2, Parity::Odd, NeverZero, &[]),
            Claim::new(2, Parity::Odd, MinimumAt, &all_aligned),
            Claim::new(2, Parity::Odd, MaximumAt, &orbit_reversed),
            Claim::new(1, Parity::Odd, ZeroAt, &all_aligned),
            Claim::new(1, Parity::Odd, MaximumAt, &orbit_reversed),
            Claim::new(0, Parity::Odd, ZeroAt, &[(SpinOrbit, 1)]),
            Claim::new(0, Parity::Odd, ZeroAt, &[(OrbitNucleus, 1)]),
            Claim::new(
                0,
                Parity::Odd,
                MaximumAt,
                &[(SpinNucleus, 1), (SpinOrbit, -1)],
            ),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimVerdict {
    pub channel: Channel,
    pub kind: ClaimKind,
    pub condition: String,
    pub matching_points: usize,
    /// Distinct oracle values where the condition holds.
    pub values_at_condition: Vec<String>,
    pub grid_minimum: String,
    pub grid_maximum: String,
    pub supported: bool,
    pub observed: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discrepancy {
    pub mode: Mode,
    pub channel: Channel,
    pub p: String,
    pub p_l: String,
    pub p_n: String,
    pub closed_form: String,
    pub oracle: String,
    pub difference: String,
    pub difference_decimal: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelAgreement {
    pub mode: Mode,
    pub channel: Channel,
    pub points: usize,
    pub mismatches: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleProperties {
    pub mode: Mode,
    pub nonnegative: bool,
    pub sign_flip_invariant: bool,
    /// Oracle at zero polarization with `K = 1`.
    pub unpolarized: BTreeMap<Channel, String>,
    /// Coupled-state multiplicity `n_J (2J+1) / dim`, from counting alone.
    pub statistical_weights: BTreeMap<Channel, String>,
    pub unpolarized_matches_statistical_weights: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconciliationReport {
    pub points_per_axis: usize,
    /// `agree` when every closed form equals the oracle on the grid.
    pub verdict: String,
    pub closed_forms_agree: bool,
    pub channels: Vec<ChannelAgreement>,
    pub discrepancies: Vec<Discrepancy>,
    pub oracle_properties: Vec<OracleProperties>,
    pub claims: Vec<ClaimVerdict>,
}

impl ReconciliationReport {
    pub fn disagreeing_channels(&self) -> Vec<String> {
        self.channels
            .iter()
            .filter(|c| c.mismatches > 0)
            .map(|c| c.channel.to_string())
            .collect()
    }
}

/// Per-mode evaluation grid. Ordinary mode ignores `P_L` and sweeps `(p, P_N)`.
fn mode_grid(mode: Mode, points_per_axis: usize) -> Result<Vec<PolarizationTriple>> {
    match mode {
        Mode::Oam => PolarizationTriple::grid(points_per_axis),
        Mode::Ordinary => {
            let axis = axis_points(points_per_axis)?;
            let mut out = Vec::with_capacity(axis.len() * axis.len());
            for p in &axis {
                for p_n in &axis {
                    out.push(PolarizationTriple::new(p.clone(), int(0), p_n.clone())?);
                }
            }
            Ok(out)
        }
    }
}

/// Multiplicity of each total `J` when coupling `js` left to right.
fn coupled_multiplicities(js: &[HalfInt]) -> BTreeMap<HalfInt, usize> {
    let mut current: BTreeMap<HalfInt, usize> = BTreeMap::new();
    current.insert(HalfInt::ZERO, 1);
    for &j2 in js {
        let mut next = BTreeMap::new();
        for (&j1, &count) in &current {
            let lo = (j1 - j2).abs().twice();
            let hi = (j1 + j2).twice();
            for twice in (lo..=hi).step_by(2) {
                *next.entry(HalfInt::from_twice(twice)).or_insert(0) += count;
            }
        }
        current = next;
    }
    current
}

fn statistical_weights(mode: Mode) -> BTreeMap<Channel, BigRational> {
    let half = HalfInt::HALF;
    let factors: Vec<HalfInt> = match mode {
        Mode::Ordinary => vec![half, half],
        Mode::Oam => vec![HalfInt::ONE, half, half],
    };
    let dim: i64 = factors.iter().map(|j| i64::from(j.twice() + 1)).product();
    coupled_multiplicities(&factors)
        .into_iter()
        .map(|(j, n)| {
            let states = n as i64 * i64::from(j.twice() + 1);
            (
                Channel::new(j, mode.parity()),
                BigRational::new(states.into(), dim.into()),
            )
        })
        .collect()
}

type Row = (
    PolarizationTriple,
    Vec<(Channel, QuadRational, QuadRational)>,
);

fn evaluate(mode: Mode, grid: &[PolarizationTriple]) -> Result<Vec<Row>> {
    let registry = builtin_methods();
    let closed = registry.get(mode, "closed-form")?;
    let oracle = registry.get(mode, "oracle")?;
    let model = CaptureModel::unit(mode);
    grid.par_iter()
        .map(|pol| {
            let a = closed.cross_sections(pol, &model)?;
            let b = oracle.cross_sections(pol, &model)?;
            let values = a
                .into_iter()
                .zip(b)
                .map(|(x, y)| (x.channel, x.value, y.value))
                .collect();
            Ok((pol.clone(), values))
        })
        .collect()
}

fn check_claim(claim: &Claim, rows: &[Row]) -> ClaimVerdict {
    let series: Vec<(&PolarizationTriple, &QuadRational)> = rows
        .iter()
        .filter_map(|(pol, values)| {
            values
                .iter()
                .find(|(c, _, _)| *c == claim.channel)
                .map(|(_, _, oracle)| (pol, oracle))
        })
        .collect();
    let minimum = series
        .iter()
        .map(|(_, v)| *v)
        .min()
        .cloned()
        .unwrap_or_default();
    let maximum = series
        .iter()
        .map(|(_, v)| *v)
        .max()
        .cloned()
        .unwrap_or_default();
    let at_condition: Vec<&QuadRational> = series
        .iter()
        .filter(|(pol, _)| claim.matches(pol))
        .map(|(_, v)| *v)
        .collect();
    let mut distinct: Vec<QuadRational> = at_condition.iter().map(|v| (*v).clone()).collect();
    distinct.sort();
    distinct.dedup();

    let any = !at_condition.is_empty();
    let supported = match claim.kind {
        ClaimKind::ZeroAt => any && at_condition.iter().all(|v| v.is_zero()),
        ClaimKind::MinimumAt => any && at_condition.iter().all(|v| **v == minimum),
        ClaimKind::MaximumAt => any && at_condition.iter().all(|v| **v == maximum),
        ClaimKind::NeverZero => series.iter().all(|(_, v)| !v.is_zero()),
    };

    let observed = if claim.kind == ClaimKind::NeverZero {
        format!("grid minimum {minimum}")
    } else if !any {
        "condition not met on grid".to_string()
    } else {
        let location = if distinct.len() == 1 && distinct[0] == maximum {
            "attains the grid maximum"
        } else if distinct.len() == 1 && distinct[0] == minimum {
            "attains the grid minimum"
        } else if distinct.iter().all(|v| v.is_zero()) {
            "vanishes"
        } else {
            "is not an extremum"
        };
        let shown: Vec<String> = distinct.iter().map(|v| v.to_string()).collect();
        format!("value {{{}}} {location}", shown.join(", "))
    };

    ClaimVerdict {
        channel: claim.channel,
        kind: claim.kind,
        condition: claim.condition_text(),
        matching_points: at_condition.len(),
        values_at_condition: distinct.iter().map(|v| v.to_string()).collect(),
        grid_minimum: minimum.to_string(),
        grid_maximum: maximum.to_string(),
        supported,
        observed,
    }
}

fn oracle_properties(mode: Mode, rows: &[Row]) -> Result<OracleProperties> {
    let lookup: BTreeMap<&PolarizationTriple, &Vec<(Channel, QuadRational, QuadRational)>> =
        rows.iter().map(|(p, v)| (p, v)).collect();
    let nonnegative = rows
        .iter()
        .all(|(_, values)| values.iter().all(|(_, _, oracle)| oracle.is_nonnegative()));
    let sign_flip_invariant = rows.iter().all(|(pol, values)| {
        lookup
            .get(&pol.flipped())
            .map(|other| values.iter().zip(other.iter()).all(|(a, b)| a.2 == b.2))
            .unwrap_or(false)
    });

    let model = CaptureModel::unit(mode);
    let unpolarized_values = builtin_methods()
        .get(mode, "oracle")?
        .cross_sections(&PolarizationTriple::unpolarized(), &model)?;
    let weights = statistical_weights(mode);
    let matches = unpolarized_values.iter().all(|x| {
        weights
            .get(&x.channel)
            .map(|w| x.value == QuadRational::from_rational(w.clone()))
            == Some(true)
    });

    Ok(OracleProperties {
        mode,
        nonnegative,
        sign_flip_invariant,
        unpolarized: unpolarized_values
            .iter()
            .map(|x| (x.channel, x.value.to_string()))
            .collect(),
        statistical_weights: weights
            .iter()
            .map(|(c, w)| (*c, format_rational(w)))
            .collect(),
        unpolarized_matches_statistical_weights: matches,
    })
}

/// Compares every closed form with the oracle on a uniform grid with
/// `points_per_axis` points per polarization axis, checks oracle-side
/// properties, and tests the published zero/extremum claims.
pub fn reconcile(points_per_axis: usize) -> Result<ReconciliationReport> {
    let mut channels = Vec::new();
    let mut discrepancies = Vec::new();
    let mut properties = Vec::new();
    let mut claims = Vec::new();
    let published = Claim::published();

    for mode in Mode::ALL {
        let grid = mode_grid(mode, points_per_axis)?;
        let rows = evaluate(mode, &grid)?;

        for channel in mode.channels() {
            let mut mismatches = 0;
            for (pol, values) in &rows {
                let (_, closed, oracle) = values
                    .iter()
                    .find(|(c, _, _)| *c == channel)
                    .expect("channel evaluated");
                if closed != oracle {
                    mismatches += 1;
                    let diff = closed - oracle;
                    discrepancies.push(Discrepancy {
                        mode,
                        channel,
                        p: format_rational(pol.p()),
                        p_l: format_rational(pol.p_l()),
                        p_n: format_rational(pol.p_n()),
                        closed_form: closed.to_string(),
                        oracle: oracle.to_string(),
                        difference: diff.to_string(),
                        difference_decimal: diff.to_decimal_string(),
                    });
                }
            }
            channels.push(ChannelAgreement {
                mode,
                channel,
                points: rows.len(),
                mismatches,
            });
        }

        properties.push(oracle_properties(mode, &rows)?);
        claims.extend(
            published
                .iter()
                .filter(|c| c.channel.mode() == mode)
                .map(|c| check_claim(c, &rows)),
        );
    }

    let agree = discrepancies.is_empty();
    Ok(ReconciliationReport {
        points_per_axis,
        verdict: if agree { "agree" } else { "disagree" }.to_string(),
        closed_forms_agree: agree,
        channels,
        discrepancies,
        oracle_properties: properties,
        claims,
    })
}
