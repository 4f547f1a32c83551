//! Periodic lagged causal graphs: the discovery output and the simulator's
//! ground truth.
//!
//! Phase labels are anchored at `t = 1`: phase `k` of a period-`omega`
//! variable governs the times `t` with `((t - 1) mod omega) + 1 = k`. Both the
//! simulator and the discovery algorithms emit this labeling, which keeps
//! phase-resolved comparisons between truth and estimate well defined.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::EdgeArray4D;
use crate::panel::LaggedLink;
use crate::partition::lcm_periodicities;

/// One estimated or true parent of a variable within a phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParentLink {
    pub var: usize,
    pub lag: usize,
    pub pvalue: f64,
}

impl ParentLink {
    pub fn link(&self) -> LaggedLink {
        LaggedLink::new(self.var, self.lag)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseEntry {
    /// 1-based phase index within the variable's period.
    pub phase: usize,
    pub parents: Vec<ParentLink>,
}

/// Per-variable periodicity and phase-resolved parent sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesGraph {
    pub name: String,
    pub omega: usize,
    pub phases: Vec<PhaseEntry>,
}

impl SeriesGraph {
    /// Parent links of one phase as a set, ignoring p-values.
    pub fn phase_links(&self, phase: usize) -> BTreeSet<LaggedLink> {
        self.phases[phase - 1]
            .parents
            .iter()
            .map(ParentLink::link)
            .collect()
    }
}

/// The full graph over all variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicGraph {
    pub n: usize,
    pub tau_max: usize,
    pub variables: Vec<String>,
    pub series: Vec<SeriesGraph>,
}

impl PeriodicGraph {
    /// Validates structural invariants: phase list lengths, lag bounds, index
    /// ranges. `ground_truth` additionally rejects duplicate phase link sets
    /// within a variable (estimated graphs are exempt from that check).
    pub fn validate(&self, ground_truth: bool) -> Result<()> {
        if self.n == 0 || self.variables.len() != self.n || self.series.len() != self.n {
            return Err(Error::Data(format!(
                "graph dimensions inconsistent: n={}, {} names, {} series",
                self.n,
                self.variables.len(),
                self.series.len()
            )));
        }
        for (j, s) in self.series.iter().enumerate() {
            if s.omega == 0 {
                return Err(Error::Data(format!("variable {j}: omega must be >= 1")));
            }
            if s.phases.len() != s.omega {
                return Err(Error::Data(format!(
                    "variable {j}: {} phases recorded for omega={}",
                    s.phases.len(),
                    s.omega
                )));
            }
            for (k0, phase) in s.phases.iter().enumerate() {
                if phase.phase != k0 + 1 {
                    return Err(Error::Data(format!(
                        "variable {j}: phase entry {} labeled {}",
                        k0 + 1,
                        phase.phase
                    )));
                }
                let mut seen = BTreeSet::new();
                for p in &phase.parents {
                    if p.var >= self.n {
                        return Err(Error::Data(format!(
                            "variable {j} phase {}: parent var {} out of range",
                            k0 + 1,
                            p.var
                        )));
                    }
                    if p.lag == 0 || p.lag > self.tau_max {
                        return Err(Error::Data(format!(
                            "variable {j} phase {}: lag {} outside [1, {}]",
                            k0 + 1,
                            p.lag,
                            self.tau_max
                        )));
                    }
                    if !seen.insert((p.var, p.lag)) {
                        return Err(Error::Data(format!(
                            "variable {j} phase {}: duplicate parent {}",
                            k0 + 1,
                            p.link()
                        )));
                    }
                }
            }
            if ground_truth && s.omega > 1 {
                for a in 0..s.omega {
                    for b in (a + 1)..s.omega {
                        if s.phase_links(a + 1) == s.phase_links(b + 1) {
                            return Err(Error::Data(format!(
                                "variable {j}: phases {} and {} share an identical link set",
                                a + 1,
                                b + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// True when both graphs describe the same structure: equal periodicities
    /// and equal phase link sets per variable (p-values and `tau_max` ignored).
    pub fn same_structure(&self, other: &PeriodicGraph) -> bool {
        self.n == other.n
            && self
                .series
                .iter()
                .zip(&other.series)
                .all(|(a, b)| {
                    a.omega == b.omega
                        && (1..=a.omega).all(|k| a.phase_links(k) == b.phase_links(k))
                })
    }

    /// Largest lag appearing in any phase, 0 when the graph is empty.
    pub fn max_lag(&self) -> usize {
        self.series
            .iter()
            .flat_map(|s| s.phases.iter())
            .flat_map(|p| p.parents.iter())
            .map(|p| p.lag)
            .max()
            .unwrap_or(0)
    }

    /// Period of the whole graph: least common multiple of the per-variable
    /// periodicities.
    pub fn period(&self) -> Result<usize> {
        let omegas: Vec<usize> = self.series.iter().map(|s| s.omega).collect();
        lcm_periodicities(&omegas)
    }

    /// Phase-resolved boolean edge array of shape
    /// `[n, period, n, max_lag + 1]`; each variable's phase pattern repeats
    /// `period / omega_j` times along the phase axis.
    pub fn to_edge_array(&self, max_lag: Option<usize>) -> Result<EdgeArray4D> {
        let period = self.period()?;
        let max_lag = max_lag.unwrap_or_else(|| self.max_lag());
        let mut array = EdgeArray4D::empty(self.n, period, max_lag);
        for (j, s) in self.series.iter().enumerate() {
            for k in 1..=period {
                let local = ((k - 1) % s.omega) + 1;
                for p in &s.phases[local - 1].parents {
                    if p.lag > max_lag {
                        return Err(Error::Usage(format!(
                            "edge array lag axis {} too small for lag {}",
                            max_lag, p.lag
                        )));
                    }
                    array.set(j, k, p.var, p.lag, true);
                }
            }
        }
        Ok(array)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let graph: PeriodicGraph = serde_json::from_str(text)?;
        graph.validate(false)?;
        Ok(graph)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_graph() -> PeriodicGraph {
        PeriodicGraph {
            n: 2,
            tau_max: 2,
            variables: vec!["x1".into(), "x2".into()],
            series: vec![
                SeriesGraph {
                    name: "x1".into(),
                    omega: 2,
                    phases: vec![
                        PhaseEntry {
                            phase: 1,
                            parents: vec![ParentLink {
                                var: 0,
                                lag: 1,
                                pvalue: 0.0,
                            }],
                        },
                        PhaseEntry {
                            phase: 2,
                            parents: vec![ParentLink {
                                var: 1,
                                lag: 2,
                                pvalue: 0.001,
                            }],
                        },
                    ],
                },
                SeriesGraph {
                    name: "x2".into(),
                    omega: 1,
                    phases: vec![PhaseEntry {
                        phase: 1,
                        parents: vec![],
                    }],
                },
            ],
        }
    }

    #[test]
    fn json_round_trip_preserves_structure() {
        let g = sample_graph();
        let text = g.to_json_string().unwrap();
        let back = PeriodicGraph::from_json_str(&text).unwrap();
        assert_eq!(g, back);
        // Schema field spot-checks.
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["n"], 2);
        assert_eq!(value["series"][0]["omega"], 2);
        assert_eq!(value["series"][0]["phases"][0]["phase"], 1);
        assert_eq!(value["series"][0]["phases"][0]["parents"][0]["lag"], 1);
    }

    #[test]
    fn validate_rejects_phase_count_mismatch() {
        let mut g = sample_graph();
        g.series[0].phases.pop();
        assert!(g.validate(false).is_err());
    }

    #[test]
    fn ground_truth_rejects_identical_phases() {
        let mut g = sample_graph();
        g.series[0].phases[1].parents = vec![ParentLink {
            var: 0,
            lag: 1,
            pvalue: 0.5,
        }];
        assert!(g.validate(false).is_ok());
        assert!(g.validate(true).is_err());
    }

    #[test]
    fn edge_array_repeats_phases() {
        let g = sample_graph();
        let arr = g.to_edge_array(None).unwrap();
        assert_eq!(arr.shape(), (2, 2, 2, 3));
        // Variable 1 (omega 1) repeats its single empty phase.
        assert!(arr.phase_slice_empty(1, 1));
        assert!(arr.phase_slice_empty(1, 2));
        // Variable 0 phase 1 has (0, lag 1); phase 2 has (1, lag 2).
        assert!(arr.get(0, 1, 0, 1));
        assert!(!arr.get(0, 1, 1, 2));
        assert!(arr.get(0, 2, 1, 2));
    }
}
