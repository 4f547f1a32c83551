//! Linear partial correlation with a Student-t p-value.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::ci::design::lagged_design_matrix;
use crate::ci::{CiResult, CondIndTest};
use crate::error::{Error, Result};
use crate::panel::{LaggedLink, TimeSeriesPanel, ValueKind};

/// Residual variances at or below this are treated as degenerate.
const VARIANCE_FLOOR: f64 = 1e-12;

/// Partial-correlation CI test for continuous panels: target and tested
/// columns are each regressed on the conditioning columns (ordinary least
/// squares with intercept), the statistic is the Pearson correlation of the
/// two residual vectors, and the p-value comes from the two-sided Student-t
/// transform with `effective_n - |z| - 2` degrees of freedom.
pub struct PartialCorrelation;

impl CondIndTest for PartialCorrelation {
    fn name(&self) -> &'static str {
        "parcorr"
    }

    fn test(
        &self,
        panel: &TimeSeriesPanel,
        target: usize,
        x: LaggedLink,
        z: &[LaggedLink],
        sample_times: &[usize],
    ) -> Result<CiResult> {
        if panel.kind() != &ValueKind::Continuous {
            return Err(Error::Usage(
                "parcorr requires a continuous panel; use gsq for discrete data".into(),
            ));
        }
        let m = lagged_design_matrix(panel, target, x, z, sample_times)?;
        let n = m.effective_n();
        if n < z.len() + 3 {
            return Err(Error::InsufficientData(format!(
                "parcorr needs at least |z| + 3 = {} samples, got {}",
                z.len() + 3,
                n
            )));
        }

        let residual_y = regress_out(&m.target, &m.z);
        let residual_x = regress_out(&m.x, &m.z);
        let var_y = dot(&residual_y, &residual_y) / n as f64;
        let var_x = dot(&residual_x, &residual_x) / n as f64;
        if var_y < VARIANCE_FLOOR || var_x < VARIANCE_FLOOR {
            return Ok(CiResult::degenerate(n));
        }

        let r = dot(&residual_x, &residual_y) / (n as f64 * (var_x * var_y).sqrt());
        let r = r.clamp(-1.0, 1.0);
        let dof = (n - z.len() - 2) as f64;
        let p_value = if (1.0 - r * r) <= f64::EPSILON {
            0.0
        } else {
            let t = r * (dof / (1.0 - r * r)).sqrt();
            let dist = StudentsT::new(0.0, 1.0, dof)
                .map_err(|e| Error::Usage(format!("t distribution: {e}")))?;
            2.0 * (1.0 - dist.cdf(t.abs()))
        };
        Ok(CiResult {
            statistic: r,
            p_value: p_value.clamp(0.0, 1.0),
            effective_n: n,
            degenerate: false,
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Residuals of `y` after OLS on the conditioning columns plus an intercept.
/// Solved through the singular value decomposition, which also yields the
/// minimum-norm solution for rank-deficient conditioning sets.
fn regress_out(y: &[f64], z_cols: &[Vec<f64>]) -> Vec<f64> {
    let n = y.len();
    if z_cols.is_empty() {
        let mean = y.iter().sum::<f64>() / n as f64;
        return y.iter().map(|v| v - mean).collect();
    }
    let p = z_cols.len() + 1;
    let mut design = DMatrix::zeros(n, p);
    for row in 0..n {
        design[(row, 0)] = 1.0;
        for (col, zc) in z_cols.iter().enumerate() {
            design[(row, col + 1)] = zc[row];
        }
    }
    let rhs = DVector::from_column_slice(y);
    let svd = design.clone().svd(true, true);
    let beta = svd.solve(&rhs, 1e-12).unwrap_or_else(|_| DVector::zeros(p));
    let fitted = design * beta;
    y.iter().zip(fitted.iter()).map(|(v, f)| v - f).collect()
}
