//! Ground-truth simulator: randomized periodic structural causal models,
//! linear-Gaussian/exponential and binary panel generation, mechanism-change
//! validation, graph unrolling, and the phase-resolved truth arrays used for
//! evaluation.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::dsep::{NodeRef, UnrolledDag};
use crate::error::{Error, Result};
use crate::graph::{ParentLink, PeriodicGraph, PhaseEntry, SeriesGraph};
use crate::metrics::EdgeArray4D;
use crate::panel::{LaggedLink, TimeSeriesPanel};
use crate::partition::lcm_periodicities;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const VALUE_LIMIT: f64 = 1e6;
const STABILITY_RETRIES: usize = 256;
const MECHANISM_RETRIES: usize = 2000;

/// Seed for derived streams: retry/trial `salt` 0 returns the base seed.
pub fn derived_seed(base: u64, salt: u64) -> u64 {
    base ^ salt.wrapping_mul(GOLDEN)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Gaussian,
    Exponential,
    Binary,
}

/// How parent values enter a continuous mechanism. `Quadratic` squares each
/// parent contribution (`coeff * parent^2`); it exists as a bounded nonlinear
/// variant for stress tests, nothing more general.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MechanismForm {
    #[default]
    Linear,
    Quadratic,
}

/// One causal mechanism: the boolean lagged edge matrix plus either linear
/// coefficients (continuous) or a binary conditional probability table.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMechanism {
    /// `edges[i][tau - 1]`: parent (variable i, lag tau).
    pub edges: Vec<Vec<bool>>,
    pub coeffs: Option<Vec<Vec<f64>>>,
    /// Rows indexed by the parent configuration (bit `b` of the index is the
    /// value of the `b`-th parent in canonical (var, lag) order); each row is
    /// the distribution `[p(child = 0), p(child = 1)]`.
    pub cpt: Option<Vec<[f64; 2]>>,
}

/// A complete ground-truth model. Phase `k` of variable `j` governs times
/// `t > tau_max` with `((t - 1) mod omega_j) + 1 = k`; times up to `tau_max`
/// are exogenous noise.
///
/// Serializes to the documented spec-file layout: scalars plus nested-array
/// fields `phase_edges` (var -> phase -> variable -> lag, 0/1) and either
/// `phase_coeffs` (same nesting) or `cpts` (var -> phase -> config -> [p0, p1]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScmSpecFile", into = "ScmSpecFile")]
pub struct ScmSpec {
    pub n: usize,
    pub t_len: usize,
    pub tau_max: usize,
    pub omegas: Vec<usize>,
    pub noise: NoiseKind,
    pub seed: u64,
    pub density: f64,
    pub link_fn: MechanismForm,
    pub mechanisms: Vec<Vec<PhaseMechanism>>,
}

fn is_linear(m: &MechanismForm) -> bool {
    *m == MechanismForm::Linear
}

#[derive(Serialize, Deserialize)]
struct ScmSpecFile {
    n: usize,
    #[serde(rename = "T")]
    t_len: usize,
    tau_max: usize,
    omegas: Vec<usize>,
    noise: NoiseKind,
    seed: u64,
    density: f64,
    #[serde(default, skip_serializing_if = "is_linear")]
    link_fn: MechanismForm,
    phase_edges: Vec<Vec<Vec<Vec<u8>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phase_coeffs: Option<Vec<Vec<Vec<Vec<f64>>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cpts: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

impl From<ScmSpec> for ScmSpecFile {
    fn from(spec: ScmSpec) -> Self {
        let phase_edges = spec
            .mechanisms
            .iter()
            .map(|phases| {
                phases
                    .iter()
                    .map(|m| {
                        m.edges
                            .iter()
                            .map(|row| row.iter().map(|&b| u8::from(b)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let continuous = spec.noise != NoiseKind::Binary;
        let phase_coeffs = continuous.then(|| {
            spec.mechanisms
                .iter()
                .map(|phases| {
                    phases
                        .iter()
                        .map(|m| m.coeffs.clone().unwrap_or_default())
                        .collect()
                })
                .collect()
        });
        let cpts = (!continuous).then(|| {
            spec.mechanisms
                .iter()
                .map(|phases| {
                    phases
                        .iter()
                        .map(|m| m.cpt.clone().unwrap_or_default())
                        .collect()
                })
                .collect()
        });
        ScmSpecFile {
            n: spec.n,
            t_len: spec.t_len,
            tau_max: spec.tau_max,
            omegas: spec.omegas,
            noise: spec.noise,
            seed: spec.seed,
            density: spec.density,
            link_fn: spec.link_fn,
            phase_edges,
            phase_coeffs,
            cpts,
        }
    }
}

impl TryFrom<ScmSpecFile> for ScmSpec {
    type Error = String;

    fn try_from(file: ScmSpecFile) -> std::result::Result<Self, String> {
        if file.phase_edges.len() != file.n {
            return Err(format!(
                "phase_edges lists {} variables, expected {}",
                file.phase_edges.len(),
                file.n
            ));
        }
        let mut mechanisms = Vec::with_capacity(file.n);
        for (j, phases) in file.phase_edges.iter().enumerate() {
            let mut out = Vec::with_capacity(phases.len());
            for (k0, matrix) in phases.iter().enumerate() {
                let edges: Vec<Vec<bool>> = matrix
                    .iter()
                    .map(|row| row.iter().map(|&v| v != 0).collect())
                    .collect();
                let coeffs = file
                    .phase_coeffs
                    .as_ref()
                    .map(|c| {
                        c.get(j)
                            .and_then(|phases| phases.get(k0))
                            .cloned()
                            .ok_or_else(|| format!("phase_coeffs missing variable {j} phase {}", k0 + 1))
                    })
                    .transpose()?;
                let cpt = file
                    .cpts
                    .as_ref()
                    .map(|c| {
                        c.get(j)
                            .and_then(|phases| phases.get(k0))
                            .cloned()
                            .ok_or_else(|| format!("cpts missing variable {j} phase {}", k0 + 1))
                    })
                    .transpose()?;
                out.push(PhaseMechanism { edges, coeffs, cpt });
            }
            mechanisms.push(out);
        }
        Ok(ScmSpec {
            n: file.n,
            t_len: file.t_len,
            tau_max: file.tau_max,
            omegas: file.omegas,
            noise: file.noise,
            seed: file.seed,
            density: file.density,
            link_fn: file.link_fn,
            mechanisms,
        })
    }
}

/// Parameters for [`random_spec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomSpecParams {
    pub n: usize,
    pub t_len: usize,
    pub tau_max: usize,
    pub omega_max: usize,
    pub noise: NoiseKind,
    pub seed: u64,
    pub density: f64,
}

/// A reported pair of phases with identical edge-index sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct A6Violation {
    pub var: usize,
    pub phase_a: usize,
    pub phase_b: usize,
}

impl ScmSpec {
    /// Canonical phase of variable `var` at time `t > tau_max`.
    pub fn phase_at(&self, var: usize, t: usize) -> usize {
        ((t - 1) % self.omegas[var]) + 1
    }

    /// Parent links of one phase in canonical (var, lag) order.
    pub fn parent_links(&self, var: usize, phase: usize) -> Vec<LaggedLink> {
        let mech = &self.mechanisms[var][phase - 1];
        let mut links = Vec::new();
        for (i, row) in mech.edges.iter().enumerate() {
            for (tau0, &on) in row.iter().enumerate() {
                if on {
                    links.push(LaggedLink::new(i, tau0 + 1));
                }
            }
        }
        links.sort();
        links
    }

    /// Union of parent links over a set of phases.
    pub fn parent_union(&self, var: usize, phases: &BTreeSet<usize>) -> BTreeSet<LaggedLink> {
        let mut union = BTreeSet::new();
        for &k in phases {
            union.extend(self.parent_links(var, k));
        }
        union
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.t_len == 0 || self.tau_max == 0 {
            return Err(Error::Spec("n, T and tau_max must be positive".into()));
        }
        if self.omegas.len() != self.n || self.mechanisms.len() != self.n {
            return Err(Error::Spec("per-variable lists must have length n".into()));
        }
        let discrete = self.noise == NoiseKind::Binary;
        for (j, (&omega, phases)) in self.omegas.iter().zip(&self.mechanisms).enumerate() {
            if omega == 0 {
                return Err(Error::Spec(format!("variable {j}: omega must be >= 1")));
            }
            if phases.len() != omega {
                return Err(Error::Spec(format!(
                    "variable {j}: {} mechanisms recorded for omega={omega}",
                    phases.len()
                )));
            }
            for (k0, mech) in phases.iter().enumerate() {
                if mech.edges.len() != self.n
                    || mech.edges.iter().any(|row| row.len() != self.tau_max)
                {
                    return Err(Error::Spec(format!(
                        "variable {j} phase {}: edge matrix must be {} x {}",
                        k0 + 1,
                        self.n,
                        self.tau_max
                    )));
                }
                let link_count = mech
                    .edges
                    .iter()
                    .flatten()
                    .filter(|&&b| b)
                    .count();
                if discrete {
                    let cpt = mech.cpt.as_ref().ok_or_else(|| {
                        Error::Spec(format!(
                            "variable {j} phase {}: binary spec lacks a CPT",
                            k0 + 1
                        ))
                    })?;
                    let expected_rows = 1usize << link_count;
                    if cpt.len() != expected_rows {
                        return Err(Error::Spec(format!(
                            "variable {j} phase {}: CPT has {} rows, expected {} for {} parents",
                            k0 + 1,
                            cpt.len(),
                            expected_rows,
                            link_count
                        )));
                    }
                    for (row_idx, row) in cpt.iter().enumerate() {
                        if row.iter().any(|&p| !(0.0..=1.0).contains(&p))
                            || (row[0] + row[1] - 1.0).abs() > 1e-12
                        {
                            return Err(Error::Spec(format!(
                                "variable {j} phase {} CPT row {row_idx} is not a probability vector",
                                k0 + 1
                            )));
                        }
                    }
                } else {
                    let coeffs = mech.coeffs.as_ref().ok_or_else(|| {
                        Error::Spec(format!(
                            "variable {j} phase {}: continuous spec lacks coefficients",
                            k0 + 1
                        ))
                    })?;
                    if coeffs.len() != self.n
                        || coeffs.iter().any(|row| row.len() != self.tau_max)
                    {
                        return Err(Error::Spec(format!(
                            "variable {j} phase {}: coefficient matrix must be {} x {}",
                            k0 + 1,
                            self.n,
                            self.tau_max
                        )));
                    }
                    for i in 0..self.n {
                        for tau0 in 0..self.tau_max {
                            let edge = mech.edges[i][tau0];
                            let coeff = coeffs[i][tau0];
                            if edge && coeff == 0.0 {
                                return Err(Error::Spec(format!(
                                    "variable {j} phase {}: zero coefficient on edge ({i}, lag {})",
                                    k0 + 1,
                                    tau0 + 1
                                )));
                            }
                            if !edge && coeff != 0.0 {
                                return Err(Error::Spec(format!(
                                    "variable {j} phase {}: nonzero coefficient off edge ({i}, lag {})",
                                    k0 + 1,
                                    tau0 + 1
                                )));
                            }
                        }
                    }
                }
            }
        }
        let violations = validate_a6(self);
        if !violations.is_empty() {
            let v = &violations[0];
            return Err(Error::Spec(format!(
                "hard-mechanism-change violated: variable {} phases {} and {} share a parent index set",
                v.var, v.phase_a, v.phase_b
            )));
        }
        Ok(())
    }

    /// Ground truth as a periodic graph (p-values set to 0).
    pub fn to_periodic_graph(&self) -> PeriodicGraph {
        let variables: Vec<String> = (0..self.n).map(|j| format!("X{}", j + 1)).collect();
        let series = (0..self.n)
            .map(|j| SeriesGraph {
                name: variables[j].clone(),
                omega: self.omegas[j],
                phases: (1..=self.omegas[j])
                    .map(|k| PhaseEntry {
                        phase: k,
                        parents: self
                            .parent_links(j, k)
                            .into_iter()
                            .map(|l| ParentLink {
                                var: l.var,
                                lag: l.lag,
                                pvalue: 0.0,
                            })
                            .collect(),
                    })
                    .collect(),
            })
            .collect();
        PeriodicGraph {
            n: self.n,
            tau_max: self.tau_max,
            variables,
            series,
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: ScmSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Checks the hard-mechanism-change assumption: within each variable, no two
/// phases may share an identical parent index set. Returns every offending
/// pair (empty means the spec passes).
pub fn validate_a6(spec: &ScmSpec) -> Vec<A6Violation> {
    let mut violations = Vec::new();
    for j in 0..spec.n {
        let sets: Vec<BTreeSet<LaggedLink>> = (1..=spec.omegas[j])
            .map(|k| spec.parent_links(j, k).into_iter().collect())
            .collect();
        for a in 0..sets.len() {
            for b in (a + 1)..sets.len() {
                if sets[a] == sets[b] {
                    violations.push(A6Violation {
                        var: j,
                        phase_a: a + 1,
                        phase_b: b + 1,
                    });
                }
            }
        }
    }
    violations
}

/// Draws a random spec: one variable is forced to `omega_max`, the others
/// draw their periodicity uniformly from `[1, omega_max]`; per phase, edges
/// are i.i.d. Bernoulli(density) and coefficients uniform on
/// `[-0.8, -0.2] U [0.2, 0.8]`.
///
/// Phase edge sets of one variable are redrawn until they are pairwise
/// incomparable under set inclusion, which is (strictly) stronger than the
/// plain no-identical-sets rule and is what makes the sparsity-based
/// periodicity selection identifiable.
pub fn random_spec(params: &RandomSpecParams) -> Result<ScmSpec> {
    if params.n == 0 || params.t_len == 0 || params.tau_max == 0 || params.omega_max == 0 {
        return Err(Error::Usage(
            "random_spec needs positive n, T, tau_max and omega_max".into(),
        ));
    }
    if !(params.density > 0.0 && params.density <= 1.0) {
        return Err(Error::Usage(format!(
            "density must lie in (0, 1], got {}",
            params.density
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let forced = rng.gen_range(0..params.n);
    let omegas: Vec<usize> = (0..params.n)
        .map(|j| {
            if j == forced {
                params.omega_max
            } else {
                rng.gen_range(1..=params.omega_max)
            }
        })
        .collect();

    let discrete = params.noise == NoiseKind::Binary;
    let mut mechanisms = Vec::with_capacity(params.n);
    for &omega in &omegas {
        let phase_edges = draw_incomparable_edge_sets(
            &mut rng,
            params.n,
            params.tau_max,
            omega,
            params.density,
        )?;
        let mut phases = Vec::with_capacity(omega);
        for edges in phase_edges {
            let link_count = edges.iter().flatten().filter(|&&b| b).count();
            let mech = if discrete {
                let rows = 1usize << link_count;
                let cpt: Vec<[f64; 2]> = (0..rows)
                    .map(|_| {
                        let p1 = rng.gen_range(0.2..0.8);
                        [1.0 - p1, p1]
                    })
                    .collect();
                PhaseMechanism {
                    edges,
                    coeffs: None,
                    cpt: Some(cpt),
                }
            } else {
                let mut coeffs = vec![vec![0.0; params.tau_max]; params.n];
                for i in 0..params.n {
                    for tau0 in 0..params.tau_max {
                        if edges[i][tau0] {
                            let magnitude = rng.gen_range(0.2..0.8);
                            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                            coeffs[i][tau0] = sign * magnitude;
                        }
                    }
                }
                PhaseMechanism {
                    edges,
                    coeffs: Some(coeffs),
                    cpt: None,
                }
            };
            phases.push(mech);
        }
        mechanisms.push(phases);
    }

    let spec = ScmSpec {
        n: params.n,
        t_len: params.t_len,
        tau_max: params.tau_max,
        omegas,
        noise: params.noise,
        seed: params.seed,
        density: params.density,
        link_fn: MechanismForm::Linear,
        mechanisms,
    };
    spec.validate()?;
    Ok(spec)
}

fn draw_incomparable_edge_sets(
    rng: &mut ChaCha8Rng,
    n: usize,
    tau_max: usize,
    omega: usize,
    density: f64,
) -> Result<Vec<Vec<Vec<bool>>>> {
    let draw_one = |rng: &mut ChaCha8Rng| -> Vec<Vec<bool>> {
        (0..n)
            .map(|_| (0..tau_max).map(|_| rng.gen_bool(density)).collect())
            .collect()
    };
    if omega == 1 {
        return Ok(vec![draw_one(rng)]);
    }
    'attempt: for _ in 0..MECHANISM_RETRIES {
        let candidates: Vec<Vec<Vec<bool>>> = (0..omega).map(|_| draw_one(rng)).collect();
        let sets: Vec<BTreeSet<(usize, usize)>> = candidates
            .iter()
            .map(|edges| {
                edges
                    .iter()
                    .enumerate()
                    .flat_map(|(i, row)| {
                        row.iter()
                            .enumerate()
                            .filter(|(_, &b)| b)
                            .map(move |(tau0, _)| (i, tau0))
                    })
                    .collect()
            })
            .collect();
        for a in 0..omega {
            for b in 0..omega {
                if a != b && sets[a].is_subset(&sets[b]) {
                    continue 'attempt;
                }
            }
        }
        return Ok(candidates);
    }
    Err(Error::Spec(format!(
        "could not draw {omega} pairwise-incomparable parent sets over {n} x {tau_max} candidates at density {density}; widen the lag/variable space or adjust density"
    )))
}

/// Generates a continuous panel from the spec at unit noise scale.
pub fn gen_linear_panel(spec: &ScmSpec) -> Result<TimeSeriesPanel> {
    gen_linear_panel_scaled(spec, 1.0)
}

/// Continuous generation with a configurable innovation scale. The scale
/// applies to the noise driving the mechanisms (`t > tau_max`); startup draws
/// keep unit scale so the noise-free limit (`noise_scale = 0`) still
/// propagates non-trivial values deterministically through the mechanisms.
pub fn gen_linear_panel_scaled(spec: &ScmSpec, noise_scale: f64) -> Result<TimeSeriesPanel> {
    spec.validate()?;
    if spec.noise == NoiseKind::Binary {
        return Err(Error::Usage(
            "binary specs generate via gen_binary_panel".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derived_seed(spec.seed, 0x47454E));
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let exponential = Exp::new(1.0).expect("unit-rate exponential");
    let draw = |rng: &mut ChaCha8Rng| -> f64 {
        match spec.noise {
            NoiseKind::Gaussian => normal.sample(rng),
            NoiseKind::Exponential => exponential.sample(rng),
            NoiseKind::Binary => unreachable!(),
        }
    };

    let n = spec.n;
    let t_len = spec.t_len;
    let mut values = vec![vec![0.0f64; t_len]; n];
    for t in 1..=t_len.min(spec.tau_max) {
        for var in values.iter_mut() {
            var[t - 1] = draw(&mut rng);
        }
    }
    for t in (spec.tau_max + 1)..=t_len {
        for j in 0..n {
            let phase = spec.phase_at(j, t);
            let mech = &spec.mechanisms[j][phase - 1];
            let coeffs = mech.coeffs.as_ref().expect("validated continuous spec");
            let mut acc = 0.0;
            for i in 0..n {
                for tau0 in 0..spec.tau_max {
                    if mech.edges[i][tau0] {
                        let parent = values[i][t - 1 - (tau0 + 1)];
                        let input = match spec.link_fn {
                            MechanismForm::Linear => parent,
                            MechanismForm::Quadratic => parent * parent,
                        };
                        acc += coeffs[i][tau0] * input;
                    }
                }
            }
            let value = acc + noise_scale * draw(&mut rng);
            if value.abs() > VALUE_LIMIT {
                return Err(Error::Unstable(format!(
                    "spec seed {} diverged at variable {j}, t={t} (|value| > {VALUE_LIMIT:e})",
                    spec.seed
                )));
            }
            values[j][t - 1] = value;
        }
    }
    let names = (0..n).map(|j| format!("X{}", j + 1)).collect();
    TimeSeriesPanel::continuous(names, values)
}

/// Generates a binary panel: startup times are fair coin flips, afterwards
/// each child samples from the CPT row selected by its realized parent values
/// under the phase active at that time.
pub fn gen_binary_panel(spec: &ScmSpec) -> Result<TimeSeriesPanel> {
    spec.validate()?;
    if spec.noise != NoiseKind::Binary {
        return Err(Error::Usage(
            "continuous specs generate via gen_linear_panel".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derived_seed(spec.seed, 0x47454E));
    let n = spec.n;
    let t_len = spec.t_len;
    let mut values = vec![vec![0.0f64; t_len]; n];
    for t in 1..=t_len.min(spec.tau_max) {
        for var in values.iter_mut() {
            var[t - 1] = if rng.gen_bool(0.5) { 1.0 } else { 0.0 };
        }
    }
    // Cache the canonical link order per (variable, phase).
    let link_order: Vec<Vec<Vec<LaggedLink>>> = (0..n)
        .map(|j| {
            (1..=spec.omegas[j])
                .map(|k| spec.parent_links(j, k))
                .collect()
        })
        .collect();
    for t in (spec.tau_max + 1)..=t_len {
        for j in 0..n {
            let phase = spec.phase_at(j, t);
            let links = &link_order[j][phase - 1];
            let mut config = 0usize;
            for (bit, link) in links.iter().enumerate() {
                if values[link.var][t - 1 - link.lag] != 0.0 {
                    config |= 1 << bit;
                }
            }
            let row = spec.mechanisms[j][phase - 1]
                .cpt
                .as_ref()
                .expect("validated binary spec")[config];
            values[j][t - 1] = if rng.gen_bool(row[1]) { 1.0 } else { 0.0 };
        }
    }
    let names = (0..n).map(|j| format!("X{}", j + 1)).collect();
    TimeSeriesPanel::discrete(names, values)
}

/// Unrolls the spec into an explicit DAG over `(variable, time)` nodes for
/// times `1..=horizon`; startup times have no parents.
pub fn unroll(spec: &ScmSpec, horizon: usize) -> Result<UnrolledDag> {
    if horizon < spec.tau_max + 1 {
        return Err(Error::Usage(format!(
            "unroll horizon {horizon} must be at least tau_max + 1 = {}",
            spec.tau_max + 1
        )));
    }
    let mut dag = UnrolledDag::new(spec.n, horizon);
    for t in (spec.tau_max + 1)..=horizon {
        for j in 0..spec.n {
            let phase = spec.phase_at(j, t);
            for link in spec.parent_links(j, phase) {
                dag.add_edge(NodeRef::new(link.var, t - link.lag), NodeRef::new(j, t))?;
            }
        }
    }
    Ok(dag)
}

/// Phase-resolved boolean truth array of shape `[n, Omega, n, tau_max + 1]`,
/// where `Omega` is the least common multiple of the per-variable periods;
/// variable `j`'s phase pattern repeats `Omega / omega_j` times.
pub fn true_edge_array(spec: &ScmSpec) -> Result<EdgeArray4D> {
    let big_omega = lcm_periodicities(&spec.omegas)?;
    let mut array = EdgeArray4D::empty(spec.n, big_omega, spec.tau_max);
    for j in 0..spec.n {
        for k in 1..=big_omega {
            let local = ((k - 1) % spec.omegas[j]) + 1;
            for link in spec.parent_links(j, local) {
                array.set(j, k, link.var, link.lag, true);
            }
        }
    }
    Ok(array)
}

/// Draws specs (with retry-derived seeds) until panel generation stays within
/// the stability limit, returning the spec that actually generated the data.
pub fn simulate_stable(params: &RandomSpecParams) -> Result<(ScmSpec, TimeSeriesPanel)> {
    let mut last_err = None;
    for retry in 0..STABILITY_RETRIES {
        let attempt = RandomSpecParams {
            seed: derived_seed(params.seed, retry as u64),
            ..*params
        };
        let spec = random_spec(&attempt)?;
        let panel = if params.noise == NoiseKind::Binary {
            gen_binary_panel(&spec)
        } else {
            gen_linear_panel(&spec)
        };
        match panel {
            Ok(panel) => return Ok((spec, panel)),
            Err(Error::Unstable(msg)) => {
                last_err = Some(msg);
                continue;
            }
            Err(other) => return Err(other),
        }
    }
    Err(Error::Unstable(format!(
        "no stable draw after {STABILITY_RETRIES} retries from seed {} (n={}, tau_max={}, omega_max={}, density={}); last: {}",
        params.seed,
        params.n,
        params.tau_max,
        params.omega_max,
        params.density,
        last_err.unwrap_or_default()
    )))
}
