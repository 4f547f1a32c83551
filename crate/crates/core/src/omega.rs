//! The periodicity search: per-phase pruning of the candidate supersets over
//! every periodicity guess, and selection of the guess whose largest parent
//! set is smallest (with an optional turning-point shortcut).

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::ci::CondIndTest;
use crate::config::DiscoveryConfig;
use crate::error::{Error, Result};
use crate::graph::{ParentLink, PeriodicGraph, PhaseEntry, SeriesGraph};
use crate::panel::{LaggedLink, TimeSeriesPanel};
use crate::partition::build_partition;
use crate::pcmci::{run_pcmci, LinkMap, SupersetParents};

/// Scan record for one (variable, guess) cell.
#[derive(Debug, Clone, PartialEq)]
pub enum ScanStatus {
    Evaluated {
        /// Parent sets in canonical phase order (anchored at t = 1).
        phase_sets: Vec<Vec<ParentLink>>,
        /// Largest phase parent-set size: the selection objective.
        max_size: usize,
        /// CI tests that could not run and left their link in place.
        insufficient_tests: usize,
    },
    Infeasible {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanEntry {
    pub omega: usize,
    pub status: ScanStatus,
}

impl ScanEntry {
    pub fn max_size(&self) -> Option<usize> {
        match &self.status {
            ScanStatus::Evaluated { max_size, .. } => Some(*max_size),
            ScanStatus::Infeasible { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarScan {
    pub entries: Vec<ScanEntry>,
    pub selected: usize,
    pub by_turning_point: bool,
}

/// Full periodicity-search record, one row per variable and guess.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OmegaScan {
    pub per_var: Vec<VarScan>,
}

/// Everything a run produces: the graph, the scan, and the stationary pass
/// it was built from.
#[derive(Debug, Clone)]
pub struct DiscoveryReport {
    pub graph: PeriodicGraph,
    pub scan: OmegaScan,
    pub supersets: SupersetParents,
    pub pcmci_links: LinkMap,
}

/// Prunes the candidate superset of `target` once per phase of the guess
/// `omega`: a candidate is removed from a phase when the CI test of the link,
/// conditioned on the fixed union of both endpoints' supersets (source side
/// shifted by the tested lag), accepts independence on that phase's samples.
/// Returned sets are in canonical phase order (anchored at t = 1); a test
/// that cannot run leaves its link in place and is counted.
pub fn phase_parent_sets(
    panel: &TimeSeriesPanel,
    target: usize,
    omega: usize,
    supersets: &SupersetParents,
    ci: &dyn CondIndTest,
    cfg: &DiscoveryConfig,
) -> Result<(Vec<Vec<ParentLink>>, usize)> {
    let start = 2 * cfg.tau_ub;
    let partition = build_partition(omega, start, panel.t_len())?;
    let candidates = supersets.links(target);
    let mut canonical_sets: Vec<Option<Vec<ParentLink>>> = vec![None; omega];
    let mut insufficient = 0usize;

    for (k0, subset) in partition.subsets().iter().enumerate() {
        let mut kept = Vec::new();
        for &link in &candidates {
            let z = phase_condition_set(supersets, target, link);
            match ci.test(panel, target, link, &z, subset) {
                Ok(res) => {
                    if res.p_value <= cfg.alpha_mci {
                        kept.push(ParentLink {
                            var: link.var,
                            lag: link.lag,
                            pvalue: res.p_value,
                        });
                    }
                }
                Err(Error::InsufficientData(_)) => {
                    insufficient += 1;
                    kept.push(ParentLink {
                        var: link.var,
                        lag: link.lag,
                        pvalue: f64::NAN,
                    });
                }
                Err(other) => return Err(other),
            }
        }
        // Subset k starts at time start + k0; its canonical phase label is
        // determined by that anchor.
        let first_time = start + k0;
        let canonical = ((first_time - 1) % omega) + 1;
        canonical_sets[canonical - 1] = Some(kept);
    }
    let sets: Vec<Vec<ParentLink>> = canonical_sets
        .into_iter()
        .map(|s| s.expect("every canonical phase covered by exactly one subset"))
        .collect();
    Ok((sets, insufficient))
}

/// Fixed conditioning set for the per-phase tests: union of the target's and
/// the (lag-shifted) source's supersets, minus the tested link.
fn phase_condition_set(
    supersets: &SupersetParents,
    target: usize,
    tested: LaggedLink,
) -> Vec<LaggedLink> {
    let mut z: BTreeSet<LaggedLink> = supersets
        .per_var[target]
        .iter()
        .map(|rp| rp.link)
        .filter(|&l| l != tested)
        .collect();
    for rp in &supersets.per_var[tested.var] {
        let shifted = LaggedLink::new(rp.link.var, rp.link.lag + tested.lag);
        if shifted != tested {
            z.insert(shifted);
        }
    }
    z.into_iter().collect()
}

/// First guess strictly below both neighbors; all three must be feasible.
fn find_turning_point(sizes: &[Option<usize>]) -> Option<usize> {
    for w in 2..sizes.len() {
        if let (Some(prev), Some(here), Some(next)) = (sizes[w - 2], sizes[w - 1], sizes[w]) {
            if here < prev.min(next) {
                return Some(w);
            }
        }
    }
    None
}

/// Smallest feasible guess attaining the minimum objective value.
fn select_argmin(sizes: &[Option<usize>]) -> Result<usize> {
    let mut best: Option<(usize, usize)> = None;
    for (idx, size) in sizes.iter().enumerate() {
        if let Some(s) = size {
            if best.map_or(true, |(_, bs)| *s < bs) {
                best = Some((idx + 1, *s));
            }
        }
    }
    best.map(|(w, _)| w)
        .ok_or_else(|| Error::InsufficientData("no feasible periodicity guess".into()))
}

/// Selects the periodicity estimate from the per-guess objective values
/// (`sizes[w - 1]` is the largest phase parent-set size under guess `w`,
/// `None` when the guess was infeasible).
///
/// With `use_turning_point`, the first feasible guess strictly below both
/// feasible neighbors wins; otherwise (and as the fallback) the smallest
/// guess attaining the minimum value wins.
pub fn select_omega(sizes: &[Option<usize>], use_turning_point: bool) -> Result<usize> {
    if use_turning_point {
        if let Some(w) = find_turning_point(sizes) {
            return Ok(w);
        }
    }
    select_argmin(sizes)
}

/// The full run: stationary pass for supersets, per-variable scan over all
/// guesses, selection, and assembly of the periodic graph (phases in
/// canonical order).
pub fn discover(
    panel: &TimeSeriesPanel,
    ci: &dyn CondIndTest,
    cfg: &DiscoveryConfig,
) -> Result<DiscoveryReport> {
    cfg.validate()?;
    let t_len = panel.t_len();
    if t_len < 2 * cfg.tau_ub + cfg.omega_ub {
        return Err(Error::Usage(format!(
            "panel length {t_len} is too short for tau_ub {} and omega_ub {} (need T >= {})",
            cfg.tau_ub,
            cfg.omega_ub,
            2 * cfg.tau_ub + cfg.omega_ub
        )));
    }

    let sample_times: Vec<usize> = ((cfg.tau_ub + 1)..=t_len).collect();
    let outcome = run_pcmci(panel, ci, cfg, &sample_times)?;
    let supersets = &outcome.supersets;

    let n = panel.n();
    let cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| (1..=cfg.omega_ub).map(move |w| (j, w)))
        .collect();
    let scanned: Result<Vec<((usize, usize), ScanStatus)>> = cells
        .par_iter()
        .map(|&(j, w)| {
            let status = match phase_parent_sets(panel, j, w, supersets, ci, cfg) {
                Ok((phase_sets, insufficient_tests)) => {
                    let max_size = phase_sets.iter().map(Vec::len).max().unwrap_or(0);
                    ScanStatus::Evaluated {
                        phase_sets,
                        max_size,
                        insufficient_tests,
                    }
                }
                Err(Error::InsufficientData(reason)) => ScanStatus::Infeasible { reason },
                Err(other) => return Err(other),
            };
            Ok(((j, w), status))
        })
        .collect();
    let mut by_cell: std::collections::BTreeMap<(usize, usize), ScanStatus> =
        scanned?.into_iter().collect();

    let mut per_var = Vec::with_capacity(n);
    let mut series = Vec::with_capacity(n);
    for j in 0..n {
        let entries: Vec<ScanEntry> = (1..=cfg.omega_ub)
            .map(|w| ScanEntry {
                omega: w,
                status: by_cell.remove(&(j, w)).expect("cell scanned"),
            })
            .collect();
        let sizes: Vec<Option<usize>> = entries.iter().map(ScanEntry::max_size).collect();
        let turning = if cfg.turning_point {
            find_turning_point(&sizes)
        } else {
            None
        };
        let by_turning_point = turning.is_some();
        let selected = match turning {
            Some(w) => w,
            None => select_argmin(&sizes)?,
        };
        let chosen_sets = match &entries[selected - 1].status {
            ScanStatus::Evaluated { phase_sets, .. } => phase_sets.clone(),
            ScanStatus::Infeasible { .. } => unreachable!("selected guess is feasible"),
        };

        // Estimated phase sets never leave the superset: they start from it
        // and only shrink.
        let superset_links = supersets.link_set(j);
        for set in &chosen_sets {
            debug_assert!(set.iter().all(|p| superset_links.contains(&p.link())));
        }

        series.push(SeriesGraph {
            name: panel.names()[j].clone(),
            omega: selected,
            phases: chosen_sets
                .into_iter()
                .enumerate()
                .map(|(k0, parents)| PhaseEntry {
                    phase: k0 + 1,
                    parents,
                })
                .collect(),
        });
        per_var.push(VarScan {
            entries,
            selected,
            by_turning_point,
        });
    }

    let graph = PeriodicGraph {
        n,
        tau_max: 0,
        variables: panel.names().to_vec(),
        series,
    };
    let tau_max = graph.max_lag();
    let graph = PeriodicGraph { tau_max, ..graph };
    graph.validate(false)?;

    Ok(DiscoveryReport {
        graph,
        scan: OmegaScan { per_var },
        supersets: outcome.supersets,
        pcmci_links: outcome.links,
    })
}
