use std::cmp::Ordering;

use rayon::prelude::*;

use crate::am_algebra::QuadRational;
use crate::cross_sections::{channel_fractions, CaptureModel, Mode};
use crate::error::{Error, Result};
use crate::polarization::PolarizationTriple;

use super::design_matrix;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub pol: PolarizationTriple,
    /// `sigma_c / sigma_total` at `K = 1`; `None` if the total vanishes.
    pub fractions: Option<Vec<QuadRational>>,
    /// Condition number of the design over [`flip_candidates`]; infinite
    /// when the constants are not all identifiable from that set.
    pub condition_number: f64,
}

/// The point itself plus the three settings reached by reversing one
/// polarization at a time (a spin flipper per knob).
pub fn flip_candidates(pol: &PolarizationTriple) -> Vec<PolarizationTriple> {
    let p = pol.p().clone();
    let l = pol.p_l().clone();
    let n = pol.p_n().clone();
    let make = |a, b, c| PolarizationTriple::new(a, b, c).expect("sign flips stay in range");
    vec![
        pol.clone(),
        make(-p.clone(), l.clone(), n.clone()),
        make(p.clone(), -l.clone(), n.clone()),
        make(p, l, -n),
    ]
}

fn condition_number(pols: &[PolarizationTriple], mode: Mode) -> Result<f64> {
    let refs: Vec<&PolarizationTriple> = pols.iter().collect();
    let d = design_matrix(&refs, mode)?;
    let wide = d.nrows() < d.ncols();
    let sv = d.svd(false, false).singular_values;
    let hi = sv.max();
    let lo = sv.min();
    Ok(if wide || lo <= hi * 1e-12 {
        f64::INFINITY
    } else {
        hi / lo
    })
}

/// Scans the uniform `grid_resolution^3` polarization grid. Rows are sorted
/// by condition number, then lexicographically by `(p, P_L, P_N)`.
pub fn discriminability_sweep(grid_resolution: usize, mode: Mode) -> Result<Vec<SweepRow>> {
    if grid_resolution < 2 {
        return Err(Error::InvalidInput(format!(
            "sweep resolution must be at least 2, got {grid_resolution}"
        )));
    }
    let model = CaptureModel::unit(mode);
    let grid = PolarizationTriple::grid(grid_resolution)?;
    let mut rows: Vec<SweepRow> = grid
        .into_par_iter()
        .map(|pol| {
            let fractions = channel_fractions(&pol, &model)?;
            let condition_number = condition_number(&flip_candidates(&pol), mode)?;
            Ok(SweepRow {
                pol,
                fractions,
                condition_number,
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by(
        |a, b| match a.condition_number.total_cmp(&b.condition_number) {
            Ordering::Equal => a.pol.cmp(&b.pol),
            other => other,
        },
    );
    Ok(rows)
}
