//! The stationary-case machinery: PC1 condition selection, MCI link testing,
//! optional false-discovery-rate adjustment, and their composition.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::ci::CondIndTest;
use crate::config::DiscoveryConfig;
use crate::error::{Error, Result};
use crate::graph::{ParentLink, PeriodicGraph, PhaseEntry, SeriesGraph};
use crate::panel::{LaggedLink, TimeSeriesPanel};

/// A candidate parent with the smallest absolute test statistic observed for
/// it across PC1 rounds; lists are kept sorted by that statistic, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedParent {
    pub link: LaggedLink,
    pub min_stat: f64,
}

/// Per-variable candidate-parent lists feeding the periodicity search.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SupersetParents {
    pub per_var: Vec<Vec<RankedParent>>,
}

impl SupersetParents {
    pub fn links(&self, var: usize) -> Vec<LaggedLink> {
        self.per_var[var].iter().map(|p| p.link).collect()
    }

    pub fn link_set(&self, var: usize) -> BTreeSet<LaggedLink> {
        self.per_var[var].iter().map(|p| p.link).collect()
    }
}

/// One MCI link decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Adjusted p-value when FDR is enabled, else equal to `p_value`.
    pub p_adjusted: f64,
    pub effective_n: usize,
    /// Set when the test could not run (insufficient samples) and the link
    /// was retained conservatively.
    pub flagged: bool,
}

/// Keyed by (target, source, lag).
pub type LinkMap = BTreeMap<(usize, usize, usize), LinkResult>;

#[derive(Debug, Clone)]
pub struct Pc1Outcome {
    /// Surviving candidates sorted by min-|statistic| descending.
    pub survivors: Vec<RankedParent>,
    /// Minimum |statistic| seen for every initial candidate.
    pub min_stats: BTreeMap<LaggedLink, f64>,
    /// Candidates retained because a test could not run.
    pub flagged: Vec<LaggedLink>,
}

/// Result of the full stationary pass.
#[derive(Debug, Clone)]
pub struct PcmciOutcome {
    /// PC1 survivor lists (the MCI conditioning sets).
    pub pc1_parents: Vec<Vec<RankedParent>>,
    /// All-pairs MCI decisions.
    pub links: LinkMap,
    /// Links significant at `alpha_mci` (adjusted when FDR is on), sorted by
    /// the PC1 min-statistic, descending.
    pub supersets: SupersetParents,
}

fn sort_ranked(parents: &mut [RankedParent]) {
    // Descending by min_stat; ties resolved by (var, lag) for determinism.
    parents.sort_by(|a, b| {
        b.min_stat
            .partial_cmp(&a.min_stat)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.link.cmp(&b.link))
    });
}

/// PC1 condition selection for one target variable.
///
/// Starting from all `(variable, lag)` candidates up to `tau_ub`, each round
/// `p` tests every remaining candidate against conditioning subsets of size
/// `p` drawn lexicographically from the strongest other candidates; removals
/// are marked during the round and applied only after it (stable behavior).
/// A candidate whose test cannot run for lack of samples is retained and
/// flagged rather than removed.
pub fn pc1(
    panel: &TimeSeriesPanel,
    target: usize,
    ci: &dyn CondIndTest,
    cfg: &DiscoveryConfig,
    sample_times: &[usize],
) -> Result<Pc1Outcome> {
    let n = panel.n();
    let p_max = cfg.p_max.unwrap_or(n * cfg.tau_ub);

    let mut parents: Vec<RankedParent> = (0..n)
        .flat_map(|i| {
            (1..=cfg.tau_ub).map(move |tau| RankedParent {
                link: LaggedLink::new(i, tau),
                min_stat: f64::INFINITY,
            })
        })
        .collect();
    let mut min_stats: BTreeMap<LaggedLink, f64> =
        parents.iter().map(|p| (p.link, f64::INFINITY)).collect();
    let mut flagged: BTreeSet<LaggedLink> = BTreeSet::new();

    for p in 0..=p_max {
        if parents.len() < p + 1 {
            break;
        }
        let round_order: Vec<LaggedLink> = parents.iter().map(|rp| rp.link).collect();
        let mut removals: BTreeSet<LaggedLink> = BTreeSet::new();
        for &candidate in &round_order {
            let others: Vec<LaggedLink> = round_order
                .iter()
                .copied()
                .filter(|&l| l != candidate)
                .collect();
            let mut tested = 0usize;
            for subset in LexSubsets::new(others.len(), p) {
                if tested >= cfg.q_max {
                    break;
                }
                tested += 1;
                let z: Vec<LaggedLink> = subset.iter().map(|&idx| others[idx]).collect();
                match ci.test(panel, target, candidate, &z, sample_times) {
                    Ok(res) => {
                        let entry = min_stats.get_mut(&candidate).expect("candidate tracked");
                        if res.statistic.abs() < *entry {
                            *entry = res.statistic.abs();
                        }
                        if res.p_value > cfg.alpha_pc {
                            removals.insert(candidate);
                            break;
                        }
                    }
                    Err(Error::InsufficientData(_)) => {
                        flagged.insert(candidate);
                        break;
                    }
                    Err(other) => return Err(other),
                }
            }
        }
        parents.retain(|rp| !removals.contains(&rp.link));
        for rp in parents.iter_mut() {
            rp.min_stat = min_stats[&rp.link];
        }
        sort_ranked(&mut parents);
    }

    Ok(Pc1Outcome {
        survivors: parents,
        min_stats,
        flagged: flagged.into_iter().collect(),
    })
}

/// Builds the MCI conditioning set for one ordered pair: the target's PC1
/// parents without the tested link, united with the source's strongest
/// parents shifted by the tested lag.
pub fn mci_condition_set(
    pc1_parents: &[Vec<RankedParent>],
    target: usize,
    source: usize,
    lag: usize,
    p_x: Option<usize>,
) -> Vec<LaggedLink> {
    let tested = LaggedLink::new(source, lag);
    let mut z: BTreeSet<LaggedLink> = pc1_parents[target]
        .iter()
        .map(|rp| rp.link)
        .filter(|&l| l != tested)
        .collect();
    let cap = p_x.unwrap_or(usize::MAX);
    for rp in pc1_parents[source].iter().take(cap) {
        let shifted = LaggedLink::new(rp.link.var, rp.link.lag + lag);
        if shifted != tested {
            z.insert(shifted);
        }
    }
    z.into_iter().collect()
}

/// MCI stage: tests every ordered lagged pair conditioned on both endpoints'
/// candidate parents. Pairs whose test cannot run are retained conservatively
/// (p-value 0) and flagged.
pub fn mci(
    panel: &TimeSeriesPanel,
    pc1_parents: &[Vec<RankedParent>],
    ci: &dyn CondIndTest,
    cfg: &DiscoveryConfig,
    sample_times: &[usize],
) -> Result<LinkMap> {
    let n = panel.n();
    let pairs: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|j| (0..n).flat_map(move |i| (1..=cfg.tau_ub).map(move |tau| (j, i, tau))))
        .collect();
    let results: Result<Vec<((usize, usize, usize), LinkResult)>> = pairs
        .par_iter()
        .map(|&(j, i, tau)| {
            let z = mci_condition_set(pc1_parents, j, i, tau, cfg.p_x);
            let link = LaggedLink::new(i, tau);
            match ci.test(panel, j, link, &z, sample_times) {
                Ok(res) => Ok((
                    (j, i, tau),
                    LinkResult {
                        statistic: res.statistic,
                        p_value: res.p_value,
                        p_adjusted: res.p_value,
                        effective_n: res.effective_n,
                        flagged: false,
                    },
                )),
                Err(Error::InsufficientData(_)) => Ok((
                    (j, i, tau),
                    LinkResult {
                        statistic: f64::NAN,
                        p_value: 0.0,
                        p_adjusted: 0.0,
                        effective_n: 0,
                        flagged: true,
                    },
                )),
                Err(other) => Err(other),
            }
        })
        .collect();
    Ok(results?.into_iter().collect())
}

/// Benjamini-Hochberg step-up adjustment: monotone-enforced, clipped to 1,
/// order-preserving with the input slice.
pub fn fdr_adjust(pvals: &[f64]) -> Vec<f64> {
    let m = pvals.len();
    if m == 0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvals[a].partial_cmp(&pvals[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut adjusted = vec![0.0f64; m];
    let mut running = 1.0f64;
    for rank in (1..=m).rev() {
        let idx = order[rank - 1];
        let scaled = (pvals[idx] * m as f64 / rank as f64).min(1.0);
        running = running.min(scaled);
        adjusted[idx] = running;
    }
    adjusted
}

/// Runs PC1 for every variable, then the all-pairs MCI stage; the significant
/// links (optionally FDR-adjusted) become the candidate supersets consumed by
/// the periodicity search.
pub fn run_pcmci(
    panel: &TimeSeriesPanel,
    ci: &dyn CondIndTest,
    cfg: &DiscoveryConfig,
    sample_times: &[usize],
) -> Result<PcmciOutcome> {
    cfg.validate()?;
    let n = panel.n();
    let pc1_results: Result<Vec<Pc1Outcome>> = (0..n)
        .into_par_iter()
        .map(|j| pc1(panel, j, ci, cfg, sample_times))
        .collect();
    let pc1_results = pc1_results?;
    let pc1_parents: Vec<Vec<RankedParent>> =
        pc1_results.iter().map(|r| r.survivors.clone()).collect();

    let mut links = mci(panel, &pc1_parents, ci, cfg, sample_times)?;
    if cfg.fdr {
        let keys: Vec<(usize, usize, usize)> = links.keys().copied().collect();
        let pvals: Vec<f64> = keys.iter().map(|k| links[k].p_value).collect();
        let adjusted = fdr_adjust(&pvals);
        for (key, adj) in keys.iter().zip(adjusted) {
            links.get_mut(key).expect("key present").p_adjusted = adj;
        }
    }

    let mut per_var: Vec<Vec<RankedParent>> = vec![Vec::new(); n];
    for (&(j, i, tau), res) in &links {
        if res.p_adjusted <= cfg.alpha_mci {
            let link = LaggedLink::new(i, tau);
            let min_stat = pc1_results[j]
                .min_stats
                .get(&link)
                .copied()
                .unwrap_or(f64::INFINITY);
            per_var[j].push(RankedParent { link, min_stat });
        }
    }
    for list in per_var.iter_mut() {
        sort_ranked(list);
    }
    Ok(PcmciOutcome {
        pc1_parents,
        links,
        supersets: SupersetParents { per_var },
    })
}

impl PcmciOutcome {
    /// Stationary summary: a single-phase graph holding the significant links
    /// with their MCI p-values.
    pub fn window_graph(&self, names: &[String], alpha_mci: f64) -> PeriodicGraph {
        let n = names.len();
        let series = (0..n)
            .map(|j| {
                let parents: Vec<ParentLink> = self
                    .links
                    .iter()
                    .filter(|(&(target, _, _), res)| target == j && res.p_adjusted <= alpha_mci)
                    .map(|(&(_, i, tau), res)| ParentLink {
                        var: i,
                        lag: tau,
                        pvalue: res.p_adjusted,
                    })
                    .collect();
                SeriesGraph {
                    name: names[j].clone(),
                    omega: 1,
                    phases: vec![PhaseEntry { phase: 1, parents }],
                }
            })
            .collect();
        let graph = PeriodicGraph {
            n,
            tau_max: 0,
            variables: names.to_vec(),
            series,
        };
        let tau_max = graph.max_lag();
        PeriodicGraph { tau_max, ..graph }
    }
}

/// Lexicographic size-`p` index subsets of `0..len`.
struct LexSubsets {
    len: usize,
    current: Vec<usize>,
    done: bool,
}

impl LexSubsets {
    fn new(len: usize, p: usize) -> Self {
        if p > len {
            return LexSubsets {
                len,
                current: Vec::new(),
                done: true,
            };
        }
        LexSubsets {
            len,
            current: (0..p).collect(),
            done: false,
        }
    }
}

impl Iterator for LexSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let p = self.current.len();
        if p == 0 {
            self.done = true;
            return Some(out);
        }
        // Advance to the next combination.
        let mut i = p;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.current[i] != i + self.len - p {
                self.current[i] += 1;
                for k in (i + 1)..p {
                    self.current[k] = self.current[k - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}
