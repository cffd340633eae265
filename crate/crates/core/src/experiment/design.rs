use nalgebra::DMatrix;

use crate::cross_sections::{channel_cross_sections, CaptureModel, Mode};
use crate::error::Result;
use crate::polarization::PolarizationTriple;

/// Channel brackets at `K = 1`, in channel order.
pub fn design_row(pol: &PolarizationTriple, mode: Mode) -> Result<Vec<f64>> {
    let unit = CaptureModel::unit(mode);
    Ok(channel_cross_sections(pol, &unit)?
        .into_iter()
        .map(|x| x.value.to_f64())
        .collect())
}

/// Rows are settings, columns are channels; cross-sections are linear in `K`.
pub fn design_matrix(pols: &[&PolarizationTriple], mode: Mode) -> Result<DMatrix<f64>> {
    let columns = mode.channels().len();
    let mut rows = Vec::with_capacity(pols.len() * columns);
    for pol in pols {
        rows.extend(design_row(pol, mode)?);
    }
    Ok(DMatrix::from_row_slice(pols.len(), columns, &rows))
}
