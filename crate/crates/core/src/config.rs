//! Shared knobs for the discovery algorithms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters steering PC1, MCI and the periodicity search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryConfig {
    /// Upper bound on causal time lags considered.
    pub tau_ub: usize,
    /// Upper bound on the periodicity search.
    pub omega_ub: usize,
    /// Significance level for the condition-selection stage.
    pub alpha_pc: f64,
    /// Significance level for the MCI stage and the per-phase pruning.
    pub alpha_mci: f64,
    /// Maximum conditioning dimension in PC1 (`None` means `n * tau_ub`).
    pub p_max: Option<usize>,
    /// Subsets tested per candidate and conditioning size in PC1.
    pub q_max: usize,
    /// Number of source-side parents conditioned on in MCI (`None` means all).
    pub p_x: Option<usize>,
    /// Select the first strict local minimum of the parent-count profile
    /// before falling back to the arg-min rule.
    pub turning_point: bool,
    /// Benjamini-Hochberg adjustment of the MCI p-value map.
    pub fdr: bool,
}

impl DiscoveryConfig {
    pub fn new(tau_ub: usize, omega_ub: usize) -> Self {
        DiscoveryConfig {
            tau_ub,
            omega_ub,
            alpha_pc: 0.05,
            alpha_mci: 0.05,
            p_max: None,
            q_max: 1,
            p_x: None,
            turning_point: true,
            fdr: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau_ub == 0 {
            return Err(Error::Usage("tau_ub must be >= 1".into()));
        }
        if self.omega_ub == 0 {
            return Err(Error::Usage("omega_ub must be >= 1".into()));
        }
        for (name, alpha) in [("alpha_pc", self.alpha_pc), ("alpha_mci", self.alpha_mci)] {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::Usage(format!("{name} must lie in (0, 1), got {alpha}")));
            }
        }
        if self.q_max == 0 {
            return Err(Error::Usage("q_max must be >= 1".into()));
        }
        Ok(())
    }
}
