//! Error norms against the exact solution and observed orders of accuracy.

use crate::error::{Error, Result};
use crate::manufactured::u_exact;
use crate::scheme::SolutionField;

/// Allowed gap between a field's time stamp and the time its error is
/// measured at.
pub const TIME_STAMP_TOLERANCE: f64 = 1e-12;

/// Mean of absolute values (unweighted by cell volume).
pub fn l1_norm(errors: &[f64]) -> f64 {
    errors.iter().map(|e| e.abs()).sum::<f64>() / errors.len() as f64
}

/// Largest absolute value and its (0-based) index; ties go to the smaller
/// index.
pub fn linf_norm(errors: &[f64]) -> (f64, usize) {
    let mut best = (0.0, 0);
    for (j, e) in errors.iter().enumerate() {
        if e.abs() > best.0 {
            best = (e.abs(), j);
        }
    }
    best
}

/// `u_j - u_exact(x_j, t)` for every cell.
pub fn pointwise_errors(field: &SolutionField<'_>, t: f64) -> Result<Vec<f64>> {
    pointwise_errors_with(field, t, |x| u_exact(x, t))
}

/// `u_j - exact(x_j)` for every cell, after checking the time stamp.
pub fn pointwise_errors_with(
    field: &SolutionField<'_>,
    t: f64,
    exact: impl Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    if (field.time() - t).abs() > TIME_STAMP_TOLERANCE {
        return Err(Error::TimeMismatch {
            field: field.time(),
            requested: t,
        });
    }
    Ok(field
        .values()
        .iter()
        .zip(field.grid().centers())
        .map(|(u, &x)| u - exact(x))
        .collect())
}

pub fn l1_error(field: &SolutionField<'_>, t: f64) -> Result<f64> {
    Ok(l1_norm(&pointwise_errors(field, t)?))
}

/// Maximum error and the 0-based cell attaining it.
pub fn linf_error(field: &SolutionField<'_>, t: f64) -> Result<(f64, usize)> {
    Ok(linf_norm(&pointwise_errors(field, t)?))
}

/// `log(coarse / fine) / log(ratio)`.
pub fn observed_order(error_coarse: f64, error_fine: f64, refinement_ratio: f64) -> Result<f64> {
    let valid = |v: f64| v > 0.0 && v.is_finite();
    if !valid(error_coarse) || !valid(error_fine) || !(refinement_ratio > 1.0) {
        return Err(Error::OrderInput {
            coarse: error_coarse,
            fine: error_fine,
            ratio: refinement_ratio,
        });
    }
    Ok((error_coarse / error_fine).ln() / refinement_ratio.ln())
}

/// Measured errors on one refinement level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelErrors {
    pub n_cells: usize,
    pub l1: f64,
    pub linf: f64,
    /// Cell holding the maximum error.
    pub linf_cell: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub level: usize,
    pub n_cells: usize,
    pub h: f64,
    pub l1_error: f64,
    pub linf_error: f64,
    pub linf_cell: usize,
    pub l1_order: Option<f64>,
    pub linf_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn rows(&self) -> &[ConvergenceRow] {
        &self.rows
    }

    /// `(l1_order, linf_order)` between the two finest levels.
    pub fn final_orders(&self) -> (f64, f64) {
        let last = self.rows.last().expect("tables have at least two rows");
        (
            last.l1_order.expect("finest row has an order"),
            last.linf_order.expect("finest row has an order"),
        )
    }
}

/// Assembles a table with orders between consecutive levels. Levels must
/// double their cell count.
pub fn build_table(levels: &[LevelErrors]) -> Result<ConvergenceTable> {
    if levels.len() < 2 {
        return Err(Error::TooFewLevels(levels.len()));
    }
    let mut rows = Vec::with_capacity(levels.len());
    for (k, lv) in levels.iter().enumerate() {
        let (l1_order, linf_order) = if k == 0 {
            (None, None)
        } else {
            let prev = &levels[k - 1];
            if lv.n_cells != 2 * prev.n_cells {
                return Err(Error::NotDoubling {
                    coarse: prev.n_cells,
                    fine: lv.n_cells,
                });
            }
            (
                Some(observed_order(prev.l1, lv.l1, 2.0)?),
                Some(observed_order(prev.linf, lv.linf, 2.0)?),
            )
        };
        rows.push(ConvergenceRow {
            level: k,
            n_cells: lv.n_cells,
            h: 1.0 / lv.n_cells as f64,
            l1_error: lv.l1,
            linf_error: lv.linf,
            linf_cell: lv.linf_cell,
            l1_order,
            linf_order,
        });
    }
    Ok(ConvergenceTable { rows })
}
