//! Ground-truth-backed CI answers for soundness testing.

use std::collections::BTreeSet;

use crate::ci::{CiResult, CondIndTest};
use crate::dsep::{NodeRef, UnrolledDag};
use crate::error::{Error, Result};
use crate::panel::{LaggedLink, TimeSeriesPanel};
use crate::scm::{unroll, ScmSpec};

/// Infinite-sample CI oracle for periodic ground truth. The sample times
/// determine which of the target variable's true phases are pooled; the link
/// is declared dependent exactly when it belongs to the union of those
/// phases' parent sets (pooling several mechanisms makes every member of the
/// union — the true and the time-shifted "illusory" parents — detectable).
/// The conditioning set is not inspected; callers never condition on the
/// tested link itself.
pub struct MixtureOracle {
    spec: ScmSpec,
}

impl MixtureOracle {
    pub fn new(spec: ScmSpec) -> Self {
        MixtureOracle { spec }
    }

    pub fn spec(&self) -> &ScmSpec {
        &self.spec
    }
}

impl CondIndTest for MixtureOracle {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn test(
        &self,
        _panel: &TimeSeriesPanel,
        target: usize,
        x: LaggedLink,
        _z: &[LaggedLink],
        sample_times: &[usize],
    ) -> Result<CiResult> {
        if target >= self.spec.n || x.var >= self.spec.n {
            return Err(Error::Usage(format!(
                "variable index out of range for {}-variable spec",
                self.spec.n
            )));
        }
        let usable: Vec<usize> = sample_times
            .iter()
            .copied()
            .filter(|&t| t > self.spec.tau_max && t <= self.spec.t_len)
            .collect();
        if usable.is_empty() {
            return Err(Error::InsufficientData(
                "oracle query with no sample times past the startup window".into(),
            ));
        }
        let phases: BTreeSet<usize> = usable
            .iter()
            .map(|&t| self.spec.phase_at(target, t))
            .collect();
        let union = self.spec.parent_union(target, &phases);
        let dependent = union.contains(&x);
        Ok(CiResult {
            statistic: if dependent { 1.0 } else { 0.0 },
            p_value: if dependent { 0.0 } else { 1.0 },
            effective_n: usable.len(),
            degenerate: false,
        })
    }
}

/// Exact d-separation CI for *stationary* ground truth (every periodicity 1):
/// each query is answered graphically on the unrolled DAG at a fixed
/// representative time, which is valid because the local structure around any
/// sufficiently late time point is the same. Gives an independent second
/// oracle route through the discovery code.
pub struct DsepCi {
    dag: UnrolledDag,
    representative_t: usize,
}

impl DsepCi {
    /// `horizon` bounds the unrolled window; pick it large enough that
    /// ancestry relevant to the queried nodes fits (a few multiples of
    /// `n * tau_max` beyond `representative_t` lags is plenty).
    pub fn new(spec: &ScmSpec, horizon: usize, representative_t: usize) -> Result<Self> {
        if spec.omegas.iter().any(|&w| w != 1) {
            return Err(Error::Usage(
                "DsepCi answers are only valid for stationary specs (all periodicities 1)".into(),
            ));
        }
        if representative_t > horizon {
            return Err(Error::Usage(
                "representative time must lie within the horizon".into(),
            ));
        }
        Ok(DsepCi {
            dag: unroll(spec, horizon)?,
            representative_t,
        })
    }
}

impl CondIndTest for DsepCi {
    fn name(&self) -> &'static str {
        "dsep"
    }

    fn test(
        &self,
        _panel: &TimeSeriesPanel,
        target: usize,
        x: LaggedLink,
        z: &[LaggedLink],
        _sample_times: &[usize],
    ) -> Result<CiResult> {
        let t = self.representative_t;
        let max_lag = z.iter().map(|l| l.lag).max().unwrap_or(0).max(x.lag);
        if max_lag >= t {
            return Err(Error::Usage(format!(
                "representative time {t} too early for lag {max_lag}"
            )));
        }
        let x_node = NodeRef::new(x.var, t - x.lag);
        let y_node = NodeRef::new(target, t);
        let z_nodes: Vec<NodeRef> = z
            .iter()
            .map(|l| NodeRef::new(l.var, t - l.lag))
            .collect();
        let separated = self.dag.d_separated(x_node, y_node, &z_nodes)?;
        Ok(CiResult {
            statistic: if separated { 0.0 } else { 1.0 },
            p_value: if separated { 1.0 } else { 0.0 },
            effective_n: 0,
            degenerate: false,
        })
    }
}
