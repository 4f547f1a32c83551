//! Discovery algorithms behind one trait, registered by name, selected at
//! runtime.

use crate::ci::CondIndTest;
use crate::config::DiscoveryConfig;
use crate::error::{Error, Result};
use crate::graph::PeriodicGraph;
use crate::omega::{discover, OmegaScan};
use crate::panel::TimeSeriesPanel;
use crate::pcmci::{run_pcmci, SupersetParents};

/// What every algorithm returns: a periodic graph (stationary algorithms emit
/// period-1 graphs), the candidate supersets behind it, and the periodicity
/// scan when the algorithm ran one.
#[derive(Debug, Clone)]
pub struct AlgorithmOutput {
    pub graph: PeriodicGraph,
    pub supersets: SupersetParents,
    pub scan: Option<OmegaScan>,
}

/// One interchangeable graph-discovery algorithm.
pub trait DiscoveryStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn run(
        &self,
        panel: &TimeSeriesPanel,
        ci: &dyn CondIndTest,
        cfg: &DiscoveryConfig,
    ) -> Result<AlgorithmOutput>;
}

/// Stationary baseline: PC1 plus all-pairs MCI, reported as a period-1 graph.
pub struct StationaryPcmci;

impl DiscoveryStrategy for StationaryPcmci {
    fn name(&self) -> &'static str {
        "pcmci"
    }

    fn run(
        &self,
        panel: &TimeSeriesPanel,
        ci: &dyn CondIndTest,
        cfg: &DiscoveryConfig,
    ) -> Result<AlgorithmOutput> {
        let sample_times: Vec<usize> = ((cfg.tau_ub + 1)..=panel.t_len()).collect();
        let outcome = run_pcmci(panel, ci, cfg, &sample_times)?;
        let graph = outcome.window_graph(panel.names(), cfg.alpha_mci);
        Ok(AlgorithmOutput {
            graph,
            supersets: outcome.supersets,
            scan: None,
        })
    }
}

/// The periodicity-aware algorithm: superset pass, per-phase pruning over all
/// guesses, sparsity-based selection.
pub struct PeriodicPcmci;

impl DiscoveryStrategy for PeriodicPcmci {
    fn name(&self) -> &'static str {
        "pcmci-omega"
    }

    fn run(
        &self,
        panel: &TimeSeriesPanel,
        ci: &dyn CondIndTest,
        cfg: &DiscoveryConfig,
    ) -> Result<AlgorithmOutput> {
        let report = discover(panel, ci, cfg)?;
        Ok(AlgorithmOutput {
            graph: report.graph,
            supersets: report.supersets,
            scan: Some(report.scan),
        })
    }
}

pub fn available_algorithms() -> &'static [&'static str] {
    &["pcmci", "pcmci-omega"]
}

pub fn algorithm_by_name(name: &str) -> Result<Box<dyn DiscoveryStrategy>> {
    match name {
        "pcmci" => Ok(Box::new(StationaryPcmci)),
        "pcmci-omega" => Ok(Box::new(PeriodicPcmci)),
        other => Err(Error::Usage(format!(
            "unknown algorithm {:?}; available: {}",
            other,
            available_algorithms().join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_resolves_names() {
        for name in available_algorithms() {
            assert_eq!(algorithm_by_name(name).unwrap().name(), *name);
        }
        assert!(algorithm_by_name("granger").is_err());
    }
}
