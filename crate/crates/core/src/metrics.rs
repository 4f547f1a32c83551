//! Evaluation of estimated graphs against ground truth: phase-resolved edge
//! arrays, period alignment, adjacency precision/recall/F1, and periodicity
//! accuracy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::lcm_periodicities;

/// Boolean array of shape `[n, period, n, max_lag + 1]`. Entry
/// `[j, k, i, tau]` means there is an edge from variable `i` at lag `tau`
/// into variable `j` during phase `k`. The `tau = 0` slice exists for shape
/// parity with stationary adjacency conventions but is always false and is
/// excluded from metric counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeArray4D {
    n: usize,
    period: usize,
    max_lag: usize,
    data: Vec<bool>,
}

impl EdgeArray4D {
    pub fn empty(n: usize, period: usize, max_lag: usize) -> Self {
        assert!(n >= 1 && period >= 1);
        EdgeArray4D {
            n,
            period,
            max_lag,
            data: vec![false; n * period * n * (max_lag + 1)],
        }
    }

    /// `(n, period, n, max_lag + 1)`.
    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (self.n, self.period, self.n, self.max_lag + 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn max_lag(&self) -> usize {
        self.max_lag
    }

    #[inline]
    fn index(&self, target: usize, phase: usize, source: usize, lag: usize) -> usize {
        debug_assert!(target < self.n && source < self.n);
        debug_assert!(phase >= 1 && phase <= self.period);
        debug_assert!(lag <= self.max_lag);
        ((target * self.period + (phase - 1)) * self.n + source) * (self.max_lag + 1) + lag
    }

    /// Edge indicator for target variable, 1-based phase, source variable, lag.
    #[inline]
    pub fn get(&self, target: usize, phase: usize, source: usize, lag: usize) -> bool {
        self.data[self.index(target, phase, source, lag)]
    }

    #[inline]
    pub fn set(&mut self, target: usize, phase: usize, source: usize, lag: usize, value: bool) {
        assert!(lag >= 1, "lag-0 slice is contemporaneous and stays empty");
        let idx = self.index(target, phase, source, lag);
        self.data[idx] = value;
    }

    /// True when the given target/phase slice has no edges.
    pub fn phase_slice_empty(&self, target: usize, phase: usize) -> bool {
        (0..self.n).all(|i| (1..=self.max_lag).all(|tau| !self.get(target, phase, i, tau)))
    }

    /// Copy with the lag axis widened to `max_lag` (no-op when equal).
    pub fn with_max_lag(&self, max_lag: usize) -> Result<EdgeArray4D> {
        if max_lag < self.max_lag {
            return Err(Error::Usage(format!(
                "cannot shrink lag axis from {} to {}",
                self.max_lag, max_lag
            )));
        }
        let mut out = EdgeArray4D::empty(self.n, self.period, max_lag);
        for j in 0..self.n {
            for k in 1..=self.period {
                for i in 0..self.n {
                    for tau in 1..=self.max_lag {
                        if self.get(j, k, i, tau) {
                            out.set(j, k, i, tau, true);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Copy tiled along the phase axis to `period`; `period` must be a
    /// multiple of the current period. Tiling preserves per-phase content
    /// order: new phase `k` copies old phase `((k - 1) mod old_period) + 1`.
    pub fn tiled_to_period(&self, period: usize) -> Result<EdgeArray4D> {
        if period % self.period != 0 {
            return Err(Error::Usage(format!(
                "target period {} is not a multiple of {}",
                period, self.period
            )));
        }
        let mut out = EdgeArray4D::empty(self.n, period, self.max_lag);
        for j in 0..self.n {
            for k in 1..=period {
                let src = ((k - 1) % self.period) + 1;
                for i in 0..self.n {
                    for tau in 1..=self.max_lag {
                        if self.get(j, src, i, tau) {
                            out.set(j, k, i, tau, true);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Logical OR over the phase axis, collapsing to period 1.
    pub fn collapse_phases(&self) -> EdgeArray4D {
        let mut out = EdgeArray4D::empty(self.n, 1, self.max_lag);
        for j in 0..self.n {
            for i in 0..self.n {
                for tau in 1..=self.max_lag {
                    if (1..=self.period).any(|k| self.get(j, k, i, tau)) {
                        out.set(j, 1, i, tau, true);
                    }
                }
            }
        }
        out
    }

    pub fn count_edges(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let (n, p, _, l) = self.shape();
        let mut targets = Vec::with_capacity(n);
        for j in 0..n {
            let mut phases = Vec::with_capacity(p);
            for k in 1..=p {
                let mut sources = Vec::with_capacity(n);
                for i in 0..n {
                    let lags: Vec<u8> = (0..l)
                        .map(|tau| if tau >= 1 && self.get(j, k, i, tau) { 1 } else { 0 })
                        .collect();
                    sources.push(serde_json::json!(lags));
                }
                phases.push(serde_json::json!(sources));
            }
            targets.push(serde_json::json!(phases));
        }
        serde_json::json!({
            "shape": [n, p, n, l],
            "data": targets,
        })
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<EdgeArray4D> {
        #[derive(Deserialize)]
        struct File {
            shape: [usize; 4],
            data: Vec<Vec<Vec<Vec<u8>>>>,
        }
        let file: File = serde_json::from_value(value.clone())?;
        let [n, period, n2, lags] = file.shape;
        if n == 0 || period == 0 || lags == 0 || n != n2 {
            return Err(Error::Data(format!("bad edge-array shape {:?}", file.shape)));
        }
        let mut out = EdgeArray4D::empty(n, period, lags - 1);
        if file.data.len() != n {
            return Err(Error::Data("edge-array data does not match shape".into()));
        }
        for (j, phases) in file.data.iter().enumerate() {
            if phases.len() != period {
                return Err(Error::Data("edge-array data does not match shape".into()));
            }
            for (k0, sources) in phases.iter().enumerate() {
                if sources.len() != n {
                    return Err(Error::Data("edge-array data does not match shape".into()));
                }
                for (i, lag_row) in sources.iter().enumerate() {
                    if lag_row.len() != lags {
                        return Err(Error::Data("edge-array data does not match shape".into()));
                    }
                    for (tau, &bit) in lag_row.iter().enumerate() {
                        if bit != 0 {
                            if tau == 0 {
                                return Err(Error::Data(
                                    "edge-array lag-0 slice must be empty".into(),
                                ));
                            }
                            out.set(j, k0 + 1, i, tau, true);
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Adjacency comparison counts and derived scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_pos: usize,
    pub false_pos: usize,
    pub false_neg: usize,
}

/// Tiles both arrays along the phase axis to the least common multiple of
/// their periods and pads lag axes to the larger of the two.
pub fn lcm_align(truth: &EdgeArray4D, est: &EdgeArray4D) -> Result<(EdgeArray4D, EdgeArray4D)> {
    if truth.n() != est.n() {
        return Err(Error::Usage(format!(
            "cannot align arrays over {} and {} variables",
            truth.n(),
            est.n()
        )));
    }
    let period = lcm_periodicities(&[truth.period(), est.period()])?;
    let max_lag = truth.max_lag().max(est.max_lag());
    let t = truth.with_max_lag(max_lag)?.tiled_to_period(period)?;
    let e = est.with_max_lag(max_lag)?.tiled_to_period(period)?;
    Ok((t, e))
}

/// Entrywise precision/recall/F1 over all `[target, phase, source, lag >= 1]`
/// cells of two aligned arrays.
///
/// Conventions for empty denominators: with no predicted edges, precision is 1
/// if there are also no true edges and 0 otherwise (mirrored for recall);
/// F1 is 0 when precision + recall is 0.
pub fn adjacency_metrics(truth: &EdgeArray4D, est: &EdgeArray4D) -> Result<AdjacencyMetrics> {
    if truth.shape() != est.shape() {
        return Err(Error::Usage(format!(
            "adjacency_metrics needs aligned shapes, got {:?} vs {:?}",
            truth.shape(),
            est.shape()
        )));
    }
    let (n, period, _, lags) = truth.shape();
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for j in 0..n {
        for k in 1..=period {
            for i in 0..n {
                for tau in 1..lags {
                    match (truth.get(j, k, i, tau), est.get(j, k, i, tau)) {
                        (true, true) => tp += 1,
                        (false, true) => fp += 1,
                        (true, false) => fn_ += 1,
                        (false, false) => {}
                    }
                }
            }
        }
    }
    let precision = if tp + fp == 0 {
        if tp + fn_ == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = if tp + fn_ == 0 {
        if tp + fp == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(AdjacencyMetrics {
        precision,
        recall,
        f1,
        true_pos: tp,
        false_pos: fp,
        false_neg: fn_,
    })
}

/// A periodicity estimate counts as correct when it is a positive integer
/// multiple of the true value, within the search bound.
pub fn omega_accuracy(true_omega: usize, est_omega: usize, omega_ub: usize) -> bool {
    debug_assert!(true_omega >= 1 && est_omega >= 1 && omega_ub >= 1);
    est_omega <= omega_ub && est_omega % true_omega == 0
}
