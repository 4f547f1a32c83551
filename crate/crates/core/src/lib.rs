//! Causal discovery for multivariate time series whose causal mechanisms
//! repeat periodically.
//!
//! The library covers the full loop: a ground-truth simulator for periodic
//! structural causal models ([`scm`]), conditional-independence tests behind
//! a common trait ([`ci`]), the stationary PC1/MCI machinery ([`pcmci`]), the
//! periodicity search that phase-resolves the graph ([`omega`]), and
//! phase-aligned evaluation metrics ([`metrics`]). Interchangeable algorithms
//! and CI tests are registered by name ([`algorithms`], [`ci::ci_test_by_name`])
//! so callers select them at runtime.

pub mod algorithms;
pub mod ci;
pub mod config;
pub mod dsep;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod omega;
pub mod panel;
pub mod partition;
pub mod pcmci;
pub mod scm;

pub use algorithms::{algorithm_by_name, available_algorithms, AlgorithmOutput, DiscoveryStrategy};
pub use ci::{available_ci_tests, ci_test_by_name, CiResult, CondIndTest};
pub use config::DiscoveryConfig;
pub use error::{Error, Result};
pub use graph::{ParentLink, PeriodicGraph, PhaseEntry, SeriesGraph};
pub use metrics::{adjacency_metrics, lcm_align, omega_accuracy, AdjacencyMetrics, EdgeArray4D};
pub use omega::{discover, DiscoveryReport, OmegaScan};
pub use panel::{LaggedLink, TimeSeriesPanel, ValueKind};
pub use partition::{build_partition, chain_count, lcm_periodicities, phase_of, TimePartition};
pub use pcmci::{fdr_adjust, run_pcmci, PcmciOutcome, SupersetParents};
pub use scm::{
    derived_seed, gen_binary_panel, gen_linear_panel, gen_linear_panel_scaled, random_spec,
    simulate_stable, true_edge_array, unroll, validate_a6, NoiseKind, RandomSpecParams, ScmSpec,
};
