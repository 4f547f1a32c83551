//! Sample assembly for lagged CI tests.

use crate::error::{Error, Result};
use crate::panel::{LaggedLink, TimeSeriesPanel};

/// Column-aligned samples for one test: target (lag 0), tested link, and one
/// column per conditioning link. Row `r` holds the values referenced from
/// `source_times[r]`.
#[derive(Debug, Clone)]
pub struct LaggedSampleMatrix {
    pub target: Vec<f64>,
    pub x: Vec<f64>,
    pub z: Vec<Vec<f64>>,
    /// The admissible sample times actually used.
    pub source_times: Vec<usize>,
    /// How many requested times were dropped for referencing before t=1.
    pub dropped: usize,
}

impl LaggedSampleMatrix {
    pub fn effective_n(&self) -> usize {
        self.source_times.len()
    }

    /// Total column count: target + x + conditioners.
    pub fn column_count(&self) -> usize {
        self.z.len() + 2
    }
}

/// Gathers rows `(target_t, x_{t-lag}, z_{t-lag}...)` for each admissible
/// sample time. Times whose deepest reference would fall before `t = 1` (or
/// that fall outside the panel) are silently dropped and counted.
pub fn lagged_design_matrix(
    panel: &TimeSeriesPanel,
    target: usize,
    x: LaggedLink,
    z: &[LaggedLink],
    sample_times: &[usize],
) -> Result<LaggedSampleMatrix> {
    let n = panel.n();
    if target >= n || x.var >= n || z.iter().any(|l| l.var >= n) {
        return Err(Error::Usage(format!(
            "variable index out of range for {n}-variable panel"
        )));
    }
    let max_lag = z.iter().map(|l| l.lag).max().unwrap_or(0).max(x.lag);
    let t_len = panel.t_len();

    let mut matrix = LaggedSampleMatrix {
        target: Vec::new(),
        x: Vec::new(),
        z: vec![Vec::new(); z.len()],
        source_times: Vec::new(),
        dropped: 0,
    };
    for &t in sample_times {
        if t == 0 || t > t_len || t <= max_lag {
            matrix.dropped += 1;
            continue;
        }
        matrix.target.push(panel.value(target, t));
        matrix.x.push(panel.value(x.var, t - x.lag));
        for (col, link) in z.iter().enumerate() {
            matrix.z[col].push(panel.value(link.var, t - link.lag));
        }
        matrix.source_times.push(t);
    }
    if matrix.source_times.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no admissible samples for target {target}, x {x}, |z|={} ({} requested times all dropped)",
            z.len(),
            sample_times.len()
        )));
    }
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_panel(n: usize, t_len: usize) -> TimeSeriesPanel {
        // value(var, t) = 100*var + t, so reads are easy to verify.
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|j| (1..=t_len).map(|t| (100 * j + t) as f64).collect())
            .collect();
        let names = (0..n).map(|j| format!("x{j}")).collect();
        TimeSeriesPanel::continuous(names, rows).unwrap()
    }

    #[test]
    fn x_column_reads_lagged_times() {
        let panel = ramp_panel(2, 10);
        let m = lagged_design_matrix(
            &panel,
            0,
            LaggedLink::new(1, 2),
            &[],
            &[6, 8],
        )
        .unwrap();
        assert_eq!(m.source_times, vec![6, 8]);
        // x column reads variable 1 at times {4, 6}.
        assert_eq!(m.x, vec![104.0, 106.0]);
        assert_eq!(m.target, vec![6.0, 8.0]);
        assert_eq!(m.column_count(), 2);
    }

    #[test]
    fn all_dropped_is_insufficient_data() {
        let panel = ramp_panel(2, 10);
        let err = lagged_design_matrix(&panel, 0, LaggedLink::new(1, 2), &[], &[1]).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
    }

    #[test]
    fn z_columns_read_their_own_lags() {
        let panel = ramp_panel(3, 15);
        let times: Vec<usize> = vec![4, 7, 10, 13];
        let m = lagged_design_matrix(
            &panel,
            0,
            LaggedLink::new(0, 1),
            &[LaggedLink::new(1, 2)],
            &times,
        )
        .unwrap();
        for (row, &t) in m.source_times.iter().enumerate() {
            assert_eq!(m.z[0][row], (100 + t - 2) as f64);
        }
    }

    #[test]
    fn partial_drops_are_counted() {
        let panel = ramp_panel(2, 10);
        let m = lagged_design_matrix(&panel, 0, LaggedLink::new(1, 3), &[], &[2, 3, 5, 99]).unwrap();
        assert_eq!(m.dropped, 3);
        assert_eq!(m.source_times, vec![5]);
    }
}
