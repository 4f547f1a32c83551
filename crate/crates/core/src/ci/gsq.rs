//! G-squared conditional likelihood-ratio test for discrete panels.

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::ci::design::lagged_design_matrix;
use crate::ci::{CiResult, CondIndTest};
use crate::error::{Error, Result};
use crate::panel::{LaggedLink, TimeSeriesPanel};

/// Conditional G-squared test: samples are stratified by the joint
/// configuration of the conditioning columns, `G2 = 2 * sum O * ln(O / E)`
/// accumulates over nonzero observed cells with expectations from the
/// within-stratum margins, and degrees of freedom use the per-stratum
/// realized category counts `(r_x - 1) * (r_y - 1)`. Zero total degrees of
/// freedom yield a degenerate (independent) result.
pub struct GSquared;

impl CondIndTest for GSquared {
    fn name(&self) -> &'static str {
        "gsq"
    }

    fn test(
        &self,
        panel: &TimeSeriesPanel,
        target: usize,
        x: LaggedLink,
        z: &[LaggedLink],
        sample_times: &[usize],
    ) -> Result<CiResult> {
        if !panel.kind().is_discrete() {
            return Err(Error::Usage(
                "gsq requires a discrete panel; use parcorr for continuous data".into(),
            ));
        }
        let m = lagged_design_matrix(panel, target, x, z, sample_times)?;
        let n = m.effective_n();

        // Strata keyed by the z configuration; per stratum, counts keyed by
        // (x code, y code). BTreeMaps keep accumulation order deterministic.
        let mut strata: BTreeMap<Vec<u32>, BTreeMap<(u32, u32), f64>> = BTreeMap::new();
        for row in 0..n {
            let key: Vec<u32> = m.z.iter().map(|col| col[row] as u32).collect();
            let cell = (m.x[row] as u32, m.target[row] as u32);
            *strata.entry(key).or_default().entry(cell).or_insert(0.0) += 1.0;
        }

        let mut g2 = 0.0;
        let mut dof = 0usize;
        for counts in strata.values() {
            let total: f64 = counts.values().sum();
            if total <= 0.0 {
                continue;
            }
            let mut x_margin: BTreeMap<u32, f64> = BTreeMap::new();
            let mut y_margin: BTreeMap<u32, f64> = BTreeMap::new();
            for (&(xc, yc), &c) in counts {
                *x_margin.entry(xc).or_insert(0.0) += c;
                *y_margin.entry(yc).or_insert(0.0) += c;
            }
            let r_x = x_margin.len();
            let r_y = y_margin.len();
            if r_x < 2 || r_y < 2 {
                continue;
            }
            dof += (r_x - 1) * (r_y - 1);
            for (&(xc, yc), &observed) in counts {
                if observed > 0.0 {
                    let expected = x_margin[&xc] * y_margin[&yc] / total;
                    g2 += 2.0 * observed * (observed / expected).ln();
                }
            }
        }

        if dof == 0 {
            return Ok(CiResult::degenerate(n));
        }
        let g2 = g2.max(0.0);
        let dist = ChiSquared::new(dof as f64)
            .map_err(|e| Error::Usage(format!("chi-square distribution: {e}")))?;
        let p_value = (1.0 - dist.cdf(g2)).clamp(0.0, 1.0);
        Ok(CiResult {
            statistic: g2,
            p_value,
            effective_n: n,
            degenerate: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Builds a 2-variable discrete panel whose (x at lag 1, y at lag 0)
    /// design rows realize the given 2x2 counts, with `counts[xc][yc]`.
    fn panel_with_counts(counts: [[usize; 2]; 2]) -> (TimeSeriesPanel, Vec<usize>) {
        let mut xs = vec![0.0];
        let mut ys = vec![0.0];
        for (xc, row) in counts.iter().enumerate() {
            for (yc, &c) in row.iter().enumerate() {
                for _ in 0..c {
                    xs.push(xc as f64);
                    ys.push(yc as f64);
                }
            }
        }
        // y reads at time t, x reads at t-1: stagger x one step later so the
        // design pairs line up.
        let t_len = ys.len();
        let mut x_row = vec![0.0; t_len];
        for i in 1..t_len {
            x_row[i - 1] = xs[i];
        }
        let panel =
            TimeSeriesPanel::discrete(vec!["y".into(), "x".into()], vec![ys, x_row]).unwrap();
        let times: Vec<usize> = (2..=t_len).collect();
        (panel, times)
    }

    #[test]
    fn exact_independence_gives_zero_statistic() {
        let (panel, times) = panel_with_counts([[25, 25], [25, 25]]);
        let res = GSquared
            .test(&panel, 0, LaggedLink::new(1, 1), &[], &times)
            .unwrap();
        assert!(res.statistic.abs() < 1e-12);
        assert!((res.p_value - 1.0).abs() < 1e-12);
        assert!(!res.degenerate);
    }

    // Hand computation: counts [[50,0],[0,50]], margins all 50, total 100,
    // E = 25 for the two occupied cells, G2 = 2*(50 ln 2 + 50 ln 2) = 200 ln 2.
    #[test]
    fn perfect_association_matches_hand_computation() {
        let (panel, times) = panel_with_counts([[50, 0], [0, 50]]);
        let res = GSquared
            .test(&panel, 0, LaggedLink::new(1, 1), &[], &times)
            .unwrap();
        let expected = 200.0 * 2.0_f64.ln();
        assert!((res.statistic - expected).abs() < 1e-9, "{}", res.statistic);
        assert!(res.p_value < 1e-12);
    }

    /// With a binary conditioner, the total equals the sum of per-stratum
    /// statistics computed independently over the contingency cube.
    #[test]
    fn stratified_statistic_sums_over_strata() {
        // Stratum 0: [[30, 5], [10, 15]]; stratum 1: [[8, 22], [20, 4]].
        let cube = [
            [[30usize, 5], [10, 15]],
            [[8, 22], [20, 4]],
        ];
        let mut ys = vec![0.0];
        let mut xs = vec![0.0];
        let mut zs = vec![0.0];
        for (zc, table) in cube.iter().enumerate() {
            for (xc, row) in table.iter().enumerate() {
                for (yc, &c) in row.iter().enumerate() {
                    for _ in 0..c {
                        ys.push(yc as f64);
                        xs.push(xc as f64);
                        zs.push(zc as f64);
                    }
                }
            }
        }
        let t_len = ys.len();
        let mut x_row = vec![0.0; t_len];
        let mut z_row = vec![0.0; t_len];
        for i in 1..t_len {
            x_row[i - 1] = xs[i];
            z_row[i - 1] = zs[i];
        }
        let panel = TimeSeriesPanel::discrete(
            vec!["y".into(), "x".into(), "z".into()],
            vec![ys, x_row, z_row],
        )
        .unwrap();
        let times: Vec<usize> = (2..=t_len).collect();
        let combined = GSquared
            .test(
                &panel,
                0,
                LaggedLink::new(1, 1),
                &[LaggedLink::new(2, 1)],
                &times,
            )
            .unwrap();

        // Enumeration oracle: per-stratum G2 from the raw cube.
        let mut expected = 0.0;
        for table in &cube {
            let total: f64 = table.iter().flatten().map(|&c| c as f64).sum();
            let row_sum: Vec<f64> = table.iter().map(|r| r.iter().sum::<usize>() as f64).collect();
            let col_sum: Vec<f64> = (0..2)
                .map(|yc| table.iter().map(|r| r[yc] as f64).sum())
                .collect();
            for xc in 0..2 {
                for yc in 0..2 {
                    let o = table[xc][yc] as f64;
                    if o > 0.0 {
                        let e = row_sum[xc] * col_sum[yc] / total;
                        expected += 2.0 * o * (o / e).ln();
                    }
                }
            }
        }
        assert!(
            (combined.statistic - expected).abs() < 1e-9,
            "{} vs {expected}",
            combined.statistic
        );
    }

    #[test]
    fn single_category_strata_are_degenerate() {
        let (panel, times) = panel_with_counts([[40, 0], [20, 0]]);
        let res = GSquared
            .test(&panel, 0, LaggedLink::new(1, 1), &[], &times)
            .unwrap();
        assert!(res.degenerate);
        assert_eq!(res.p_value, 1.0);
    }

    #[test]
    fn invariant_to_code_relabeling() {
        let (panel, times) = panel_with_counts([[30, 10], [5, 55]]);
        let base = GSquared
            .test(&panel, 0, LaggedLink::new(1, 1), &[], &times)
            .unwrap();
        // Swap codes 0 and 1 on both variables.
        let relabeled_rows: Vec<Vec<f64>> = (0..2)
            .map(|j| {
                (1..=panel.t_len())
                    .map(|t| 1.0 - panel.value(j, t))
                    .collect()
            })
            .collect();
        let relabeled =
            TimeSeriesPanel::discrete(vec!["y".into(), "x".into()], relabeled_rows).unwrap();
        let res = GSquared
            .test(&relabeled, 0, LaggedLink::new(1, 1), &[], &times)
            .unwrap();
        assert!((res.statistic - base.statistic).abs() < 1e-10);
        assert!((res.p_value - base.p_value).abs() < 1e-10);
    }

    #[test]
    fn rejects_continuous_panels() {
        let panel = TimeSeriesPanel::continuous(
            vec!["a".into(), "b".into()],
            vec![vec![0.5, 1.5], vec![1.0, 0.0]],
        )
        .unwrap();
        assert!(GSquared
            .test(&panel, 0, LaggedLink::new(1, 1), &[], &[2])
            .is_err());
    }
}
