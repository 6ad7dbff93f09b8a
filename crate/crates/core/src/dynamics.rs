//! Linear adjacency dynamics, signed random walks, the two-species walker
//! system and extended linear threshold (ELT) dynamics.
//!
//! All simulators use the row-vector convention `x(t)ᵀ = x(t-1)ᵀ M`, i.e.
//! `x_j(t) = Σ_i M_ij x_i(t-1)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balance::{self, Verdict};
use crate::graph::SignedGraph;
use crate::matrix::DenseMatrix;
use crate::spectral::{self, SpectralError};

/// Period-2 convergence tolerance for walks.
pub const WALK_TOL: f64 = 1e-10;
/// Entries of `P̄ᵗ` below this are not used to validate sign patterns.
pub const PATTERN_SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("state has length {got}, graph has {expected} nodes")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("threshold for node {node} at t = {t} is not positive")]
    NonpositiveThreshold { node: usize, t: usize },
    #[error("ELT parameter {0} must be positive")]
    NonpositiveParameter(&'static str),
    #[error("threshold table has {got} rows, horizon is {expected}")]
    ThresholdTableTooShort { expected: usize, got: usize },
    #[error("graph is not a signed ring lattice: {0}")]
    NotLattice(String),
    #[error("{mode:?} seeding is inconsistent with a graph classified {verdict:?}")]
    InconsistentMode { mode: LatticeMode, verdict: Verdict },
    #[error("negative initial density {value} at node {node} ({species})")]
    NegativeDensity { node: usize, species: &'static str, value: f64 },
    #[error("closed form needs a non-bipartite graph")]
    BipartiteUnsupported,
    #[error("operation needs a balanced or antibalanced graph, verdict is {0:?}")]
    WrongVerdict(Verdict),
    #[error("center node {center} out of range for n = {n}")]
    CenterOutOfRange { center: usize, n: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    LinearAdjacency,
    RandomWalk,
    Elt,
    EltLattice,
    DoubledWalk,
}

/// States `x(0), …, x(T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub model: Model,
    pub states: Vec<Vec<f64>>,
    /// `Σ|x_i(0)|`, recorded because walks assume it is 1.
    pub initial_l1: f64,
    pub elt: Option<EltConfig>,
}

impl Trajectory {
    fn new(model: Model, x0: Vec<f64>, elt: Option<EltConfig>) -> Self {
        let initial_l1 = x0.iter().map(|x| x.abs()).sum();
        Trajectory { model, states: vec![x0], initial_l1, elt }
    }

    pub fn horizon(&self) -> usize {
        self.states.len() - 1
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory always holds x(0)")
    }
}

fn check_len(g: &SignedGraph, x: &[f64]) -> Result<(), DynamicsError> {
    if x.len() != g.n() {
        return Err(DynamicsError::DimensionMismatch { expected: g.n(), got: x.len() });
    }
    Ok(())
}

fn iterate(model: Model, m: &DenseMatrix, x0: &[f64], horizon: usize) -> Trajectory {
    let mut traj = Trajectory::new(model, x0.to_vec(), None);
    for _ in 0..horizon {
        let next = m.vec_mul(traj.last());
        traj.states.push(next);
    }
    traj
}

/// `x_j(t+1) = Σ_i W_ij x_i(t)`, no renormalisation.
pub fn linear_adjacency_simulate(g: &SignedGraph, x0: &[f64], horizon: usize) -> Result<Trajectory, DynamicsError> {
    check_len(g, x0)?;
    Ok(iterate(Model::LinearAdjacency, &g.adjacency(), x0, horizon))
}

/// `x(t)ᵀ = x(0)ᵀ Pᵗ` with `P = D⁻¹W`.
pub fn random_walk_simulate(g: &SignedGraph, x0: &[f64], horizon: usize) -> Result<Trajectory, DynamicsError> {
    check_len(g, x0)?;
    Ok(iterate(Model::RandomWalk, &g.transition_matrix(), x0, horizon))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Signed walk stopped once `‖x(t) - x(t-2)‖_∞ < tol` or at `max_steps`.
/// Returns the trajectory and the step at which the test first passed.
pub fn random_walk_until_converged(
    g: &SignedGraph,
    x0: &[f64],
    max_steps: usize,
    tol: f64,
) -> Result<(Trajectory, Option<usize>), DynamicsError> {
    check_len(g, x0)?;
    let p = g.transition_matrix();
    let mut traj = Trajectory::new(Model::RandomWalk, x0.to_vec(), None);
    for t in 1..=max_steps {
        let next = p.vec_mul(traj.last());
        traj.states.push(next);
        if t >= 2 && max_abs_diff(&traj.states[t], &traj.states[t - 2]) < tol {
            return Ok((traj, Some(t)));
        }
    }
    Ok((traj, None))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StationaryKind {
    Fixed,
    AlternatingPair,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryPrediction {
    pub kind: StationaryKind,
    /// `[x*]` for `Fixed` and `Zero`; `[x*ᵒ, x*ᵉ]` (odd, even) for `AlternatingPair`.
    pub vectors: Vec<Vec<f64>>,
}

impl StationaryPrediction {
    /// Predicted limit of `x(t)` along times of the parity of `t`.
    pub fn at(&self, t: usize) -> &[f64] {
        match self.kind {
            StationaryKind::AlternatingPair => &self.vectors[if t % 2 == 1 { 0 } else { 1 }],
            _ => &self.vectors[0],
        }
    }
}

/// Closed-form limit of the signed random walk: `x*_j = s_j c d_j / 2m` with
/// `c = x(0)ᵀ s` on balanced graphs, the `±` pair on antibalanced graphs and
/// zero otherwise.
pub fn predict_stationary(g: &SignedGraph, x0: &[f64]) -> Result<StationaryPrediction, DynamicsError> {
    check_len(g, x0)?;
    let c = balance::classify(g);
    let closed = |s: &balance::Bipartition| -> Vec<f64> {
        let deg = g.degree_vector();
        let coeff: f64 = x0.iter().zip(s.signs()).map(|(x, &si)| x * f64::from(si)).sum();
        deg.d.iter().enumerate().map(|(j, dj)| s.sign(j) * coeff * dj / deg.total).collect()
    };
    if c.verdict == Verdict::StrictlyUnbalanced {
        return Ok(StationaryPrediction { kind: StationaryKind::Zero, vectors: vec![vec![0.0; g.n()]] });
    }
    if g.is_bipartite() {
        return Err(DynamicsError::BipartiteUnsupported);
    }
    match (c.verdict, c.balanced_partition, c.antibalanced_partition) {
        (Verdict::Balanced, Some(s), _) => {
            Ok(StationaryPrediction { kind: StationaryKind::Fixed, vectors: vec![closed(&s)] })
        }
        (Verdict::Antibalanced, _, Some(s)) => {
            let even = closed(&s);
            let odd = even.iter().map(|x| -x).collect();
            Ok(StationaryPrediction { kind: StationaryKind::AlternatingPair, vectors: vec![odd, even] })
        }
        (v, _, _) => Err(DynamicsError::WrongVerdict(v)),
    }
}

/// Predicted signs of `Pᵗ` and how well they match the computed power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignPatternCheck {
    /// `s_i s_j`, times `(-1)ᵗ` for antibalanced graphs.
    pub predicted: Vec<Vec<i8>>,
    /// Entries with `|(P̄ᵗ)_ij| > PATTERN_SUPPORT_TOL`.
    pub checked: usize,
    pub mismatches: usize,
    /// Largest `| |(Pᵗ)_ij| - (P̄ᵗ)_ij |`.
    pub magnitude_deviation: f64,
}

pub fn transition_power_sign_pattern(g: &SignedGraph, t: u32) -> Result<SignPatternCheck, DynamicsError> {
    let c = balance::classify(g);
    let (s, flip) = match (c.verdict, c.balanced_partition, c.antibalanced_partition) {
        (Verdict::Balanced | Verdict::Both, Some(s), _) => (s, 1),
        (Verdict::Antibalanced, _, Some(s)) => (s, if t % 2 == 1 { -1 } else { 1 }),
        (v, _, _) => return Err(DynamicsError::WrongVerdict(v)),
    };
    let n = g.n();
    let pt = g.transition_matrix().pow(t);
    let pbar = g.unsigned_counterpart().transition_matrix().pow(t);
    let ss = s.signs();
    let predicted: Vec<Vec<i8>> = (0..n).map(|i| (0..n).map(|j| flip * ss[i] * ss[j]).collect()).collect();
    let (mut checked, mut mismatches, mut dev) = (0, 0, 0.0f64);
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((pt[(i, j)].abs() - pbar[(i, j)]).abs());
            if pbar[(i, j)] > PATTERN_SUPPORT_TOL {
                checked += 1;
                if f64::from(predicted[i][j]) * pt[(i, j)] <= 0.0 {
                    mismatches += 1;
                }
            }
        }
    }
    Ok(SignPatternCheck { predicted, checked, mismatches, magnitude_deviation: dev })
}

fn rank1_parts(g: &SignedGraph) -> Result<(spectral::Spectrum, Vec<f64>, f64), DynamicsError> {
    let c = balance::classify(g);
    if g.is_bipartite() {
        return Err(SpectralError::Bipartite.into());
    }
    let (s, sign) = match (c.verdict, c.balanced_partition, c.antibalanced_partition) {
        (Verdict::Balanced, Some(s), _) => (s, 1.0),
        (Verdict::Antibalanced, _, Some(s)) => (s, -1.0),
        (v, _, _) => return Err(DynamicsError::WrongVerdict(v)),
    };
    let spec = spectral::eigendecompose_symmetric(&g.unsigned_counterpart().adjacency())?;
    let u: Vec<f64> = spec.vector(0).iter().zip(s.signs()).map(|(x, &si)| x * f64::from(si)).collect();
    Ok((spec, u, sign))
}

/// `Ŵᵗ = (±λ̄₁)ᵗ I₁ ū₁ ū₁ᵀ I₁`, the dominant term of `Wᵗ`.
pub fn rank1_approximation(g: &SignedGraph, t: u32) -> Result<DenseMatrix, DynamicsError> {
    let (spec, u, sign) = rank1_parts(g)?;
    let scale = (sign * spec.max()).powi(t as i32);
    let n = g.n();
    Ok(DenseMatrix::from_fn(n, n, |i, j| scale * u[i] * u[j]))
}

/// `sqrt(Σ_{i≥2} λ̄_i^{2t})`, the Frobenius error of [`rank1_approximation`].
pub fn rank1_error_prediction(g: &SignedGraph, t: u32) -> Result<f64, DynamicsError> {
    let (spec, _, _) = rank1_parts(g)?;
    Ok(spec.values[1..].iter().map(|l| l.powi(2 * t as i32)).sum::<f64>().sqrt())
}

/// Positive- and negative-walker densities of the two-species system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubledTrajectory {
    pub plus: Trajectory,
    pub minus: Trajectory,
}

impl DoubledTrajectory {
    /// `x⁺(t) + x⁻(t)`, the unsigned walk.
    pub fn sum(&self) -> Vec<Vec<f64>> {
        self.combine(1.0)
    }

    /// `x⁺(t) - x⁻(t)`, the signed walk (polarisation).
    pub fn difference(&self) -> Vec<Vec<f64>> {
        self.combine(-1.0)
    }

    fn combine(&self, c: f64) -> Vec<Vec<f64>> {
        self.plus
            .states
            .iter()
            .zip(&self.minus.states)
            .map(|(p, m)| p.iter().zip(m).map(|(a, b)| a + c * b).collect())
            .collect()
    }
}

/// Evolves `[x⁺ x⁻]` under `P⁽²⁾`.
pub fn doubled_walk_simulate(
    g: &SignedGraph,
    xplus0: &[f64],
    xminus0: &[f64],
    horizon: usize,
) -> Result<DoubledTrajectory, DynamicsError> {
    check_len(g, xplus0)?;
    check_len(g, xminus0)?;
    for (species, x) in [("positive", xplus0), ("negative", xminus0)] {
        if let Some((node, &value)) = x.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(DynamicsError::NegativeDensity { node, species, value });
        }
    }
    let n = g.n();
    let p2 = g.doubled_transition();
    let mut x: Vec<f64> = xplus0.iter().chain(xminus0).copied().collect();
    let mut plus = Trajectory::new(Model::DoubledWalk, xplus0.to_vec(), None);
    let mut minus = Trajectory::new(Model::DoubledWalk, xminus0.to_vec(), None);
    for _ in 0..horizon {
        x = p2.vec_mul(&x);
        plus.states.push(x[..n].to_vec());
        minus.states.push(x[n..].to_vec());
    }
    Ok(DoubledTrajectory { plus, minus })
}

/// Extended linear threshold parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EltConfig {
    pub theta_l: f64,
    pub alpha: f64,
    pub l0: f64,
    pub horizon: usize,
    /// `general_thresholds[t-1][j]` is `θ_{j,t}`; overrides the geometric schedule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub general_thresholds: Option<Vec<Vec<f64>>>,
}

impl EltConfig {
    pub fn lattice(theta_l: f64, alpha: f64, l0: f64, horizon: usize) -> Self {
        EltConfig { theta_l, alpha, l0, horizon, general_thresholds: None }
    }

    fn validate(&self, n: usize) -> Result<(), DynamicsError> {
        for (name, v) in [("theta_l", self.theta_l), ("alpha", self.alpha), ("l0", self.l0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(DynamicsError::NonpositiveParameter(name));
            }
        }
        if let Some(table) = &self.general_thresholds {
            if table.len() < self.horizon {
                return Err(DynamicsError::ThresholdTableTooShort { expected: self.horizon, got: table.len() });
            }
            for (t, row) in table.iter().take(self.horizon).enumerate() {
                if row.len() != n {
                    return Err(DynamicsError::DimensionMismatch { expected: n, got: row.len() });
                }
                // also rejects NaN
                #[allow(clippy::neg_cmp_op_on_partial_ord)]
                if let Some(node) = row.iter().position(|&x| !(x > 0.0)) {
                    return Err(DynamicsError::NonpositiveThreshold { node, t: t + 1 });
                }
            }
        }
        Ok(())
    }

    /// Geometric schedule `θ_t = (θ_l α)ᵗ l0` for `t = 0..=horizon`, built as a
    /// running product so that lattice sums at the boundary compare exactly.
    pub fn geometric_schedule(&self) -> Vec<f64> {
        let ratio = self.theta_l * self.alpha;
        let mut out = Vec::with_capacity(self.horizon + 1);
        let mut th = self.l0;
        out.push(th);
        for _ in 0..self.horizon {
            th *= ratio;
            out.push(th);
        }
        out
    }
}

/// `A⁺_t` and `A⁻_t` for every step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivationSets {
    pub positive: Vec<Vec<usize>>,
    pub negative: Vec<Vec<usize>>,
}

impl ActivationSets {
    pub fn from_states(states: &[Vec<f64>]) -> Self {
        let pick = |x: &Vec<f64>, pos: bool| -> Vec<usize> {
            x.iter().enumerate().filter(|(_, v)| if pos { **v > 0.0 } else { **v < 0.0 }).map(|(j, _)| j).collect()
        };
        ActivationSets {
            positive: states.iter().map(|x| pick(x, true)).collect(),
            negative: states.iter().map(|x| pick(x, false)).collect(),
        }
    }

    /// `|A_t|`.
    pub fn active_count(&self, t: usize) -> usize {
        self.positive[t].len() + self.negative[t].len()
    }

    /// `|A_t \ A_{t-1}|`; all of `A_0` counts as new.
    pub fn new_activations(&self, t: usize) -> usize {
        let active = |k: usize, j: &usize| self.positive[k].contains(j) || self.negative[k].contains(j);
        if t == 0 {
            return self.active_count(0);
        }
        self.positive[t].iter().chain(&self.negative[t]).filter(|j| !active(t - 1, j)).count()
    }

    pub fn len(&self) -> usize {
        self.positive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty()
    }
}

/// Synchronous ELT update: `x_j(t) = ±θ_{j,t}` when `Σ_i W_ij x_i(t-1)`
/// reaches `±θ_{j,t}` (inclusive), else 0.
pub fn elt_simulate(
    g: &SignedGraph,
    x0: &[f64],
    cfg: &EltConfig,
) -> Result<(Trajectory, ActivationSets), DynamicsError> {
    check_len(g, x0)?;
    cfg.validate(g.n())?;
    let schedule = cfg.geometric_schedule();
    let w = g.adjacency();
    let mut traj = Trajectory::new(Model::Elt, x0.to_vec(), Some(cfg.clone()));
    for t in 1..=cfg.horizon {
        let input = w.vec_mul(traj.last());
        let next = input
            .iter()
            .enumerate()
            .map(|(j, &s)| {
                let th = match &cfg.general_thresholds {
                    Some(table) => table[t - 1][j],
                    None => schedule[t],
                };
                if s >= th {
                    th
                } else if s <= -th {
                    -th
                } else {
                    0.0
                }
            })
            .collect();
        traj.states.push(next);
    }
    let sets = ActivationSets::from_states(&traj.states);
    Ok((traj, sets))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeMode {
    Balanced,
    Antibalanced,
}

/// Signed ring lattice structure: node `i` adjacent exactly to `i±1, …, i±d̄/2`
/// (mod n) with one weight magnitude. Returns `(d̄, α)`.
pub fn lattice_shape(g: &SignedGraph) -> Result<(usize, f64), DynamicsError> {
    let n = g.n();
    let not = |m: String| Err(DynamicsError::NotLattice(m));
    let dbar = g.neighbours(0).len();
    if dbar < 2 || dbar % 2 == 1 || dbar >= n {
        return not(format!("node 0 has degree {dbar}"));
    }
    let alpha = g.edges()[0].w.abs();
    if let Some(e) = g.edges().iter().find(|e| (e.w.abs() - alpha).abs() > 1e-12 * alpha) {
        return not(format!("edge ({}, {}) has magnitude {} not {}", e.i, e.j, e.w.abs(), alpha));
    }
    let h = dbar / 2;
    for i in 0..n {
        let nb = g.neighbours(i);
        if nb.len() != dbar {
            return not(format!("node {i} has degree {} not {dbar}", nb.len()));
        }
        for k in 1..=h {
            for j in [(i + k) % n, (i + n - k) % n] {
                if g.weight(i, j) == 0.0 {
                    return not(format!("node {i} is not adjacent to {j}"));
                }
            }
        }
    }
    Ok((dbar, alpha))
}

/// Whether the lattice threshold guarantees spreading: `θ_l ≤ d̄/2`.
pub fn certain_propagation_check(g: &SignedGraph, theta_l: f64) -> Result<bool, DynamicsError> {
    let (dbar, _) = lattice_shape(g)?;
    Ok(theta_l <= dbar as f64 / 2.0)
}

/// Seeding used on lattices: the center at `+l0` and each neighbour at `±l0`
/// by the sign of the connecting edge (balanced mode) or its opposite
/// (antibalanced mode).
pub fn neighbourhood_seed(
    g: &SignedGraph,
    center: usize,
    l0: f64,
    mode: LatticeMode,
) -> Result<Vec<f64>, DynamicsError> {
    if center >= g.n() {
        return Err(DynamicsError::CenterOutOfRange { center, n: g.n() });
    }
    let mut x = vec![0.0; g.n()];
    x[center] = l0;
    let flip = match mode {
        LatticeMode::Balanced => 1.0,
        LatticeMode::Antibalanced => -1.0,
    };
    for &(j, w) in g.neighbours(center) {
        x[j] = if flip * w > 0.0 { l0 } else { -l0 };
    }
    Ok(x)
}

/// ELT on a ring lattice by neighbour counting: node `j` takes
/// `±(θ_l α)ᵗ l0` when `Σ_{i∈A_{t-1}} A_ij sign(x_i(t-1))` reaches `±θ_l`.
///
/// Balanced mode needs a balanced lattice and antibalanced mode an
/// antibalanced one. Strictly unbalanced lattices accept either mode so that
/// perturbed lattices can be compared with their unperturbed runs.
pub fn elt_lattice_simulate(
    g: &SignedGraph,
    center: usize,
    cfg: &EltConfig,
    mode: LatticeMode,
) -> Result<(Trajectory, ActivationSets), DynamicsError> {
    let (_, alpha) = lattice_shape(g)?;
    if (alpha - cfg.alpha).abs() > 1e-12 * alpha {
        return Err(DynamicsError::NotLattice(format!("weight magnitude {alpha} differs from alpha = {}", cfg.alpha)));
    }
    if cfg.general_thresholds.is_some() {
        return Err(DynamicsError::NotLattice("general threshold tables need elt_simulate".into()));
    }
    cfg.validate(g.n())?;
    let verdict = balance::classify(g).verdict;
    let consistent = match mode {
        LatticeMode::Balanced => verdict != Verdict::Antibalanced,
        LatticeMode::Antibalanced => verdict != Verdict::Balanced,
    };
    if !consistent {
        return Err(DynamicsError::InconsistentMode { mode, verdict });
    }
    let schedule = cfg.geometric_schedule();
    let x0 = neighbourhood_seed(g, center, cfg.l0, mode)?;
    let mut traj = Trajectory::new(Model::EltLattice, x0, Some(cfg.clone()));
    for t in 1..=cfg.horizon {
        let prev = traj.last();
        let next = (0..g.n())
            .map(|j| {
                let count: f64 = g
                    .neighbours(j)
                    .iter()
                    .filter(|&&(i, _)| prev[i] != 0.0)
                    .map(|&(i, w)| w.signum() * prev[i].signum())
                    .sum();
                if count >= cfg.theta_l {
                    schedule[t]
                } else if count <= -cfg.theta_l {
                    -schedule[t]
                } else {
                    0.0
                }
            })
            .collect();
        traj.states.push(next);
    }
    let sets = ActivationSets::from_states(&traj.states);
    Ok((traj, sets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::tests::four_node_unbalanced;

    fn triangle(w: [f64; 3]) -> SignedGraph {
        SignedGraph::new(3, [(0, 1, w[0]), (1, 2, w[1]), (0, 2, w[2])]).unwrap()
    }

    #[test]
    fn zero_state_stays_zero() {
        let g = triangle([1.0, -1.0, 2.0]);
        let tr = linear_adjacency_simulate(&g, &[0.0; 3], 5).unwrap();
        assert_eq!(tr.states.len(), 6);
        assert!(tr.states.iter().flatten().all(|&x| x == 0.0));
        assert!(matches!(linear_adjacency_simulate(&g, &[0.0; 2], 1), Err(DynamicsError::DimensionMismatch { .. })));
    }

    #[test]
    fn walks_on_triangles() {
        let tr = random_walk_simulate(&triangle([1.0; 3]), &[1.0, 0.0, 0.0], 80).unwrap();
        assert!(max_abs_diff(tr.last(), &[1.0 / 3.0; 3]) < 1e-12);
        let g = triangle([-1.0, 1.0, -1.0]);
        let tr = random_walk_simulate(&g, &[1.0, 0.0, 0.0], 80).unwrap();
        let want = [1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
        assert!(max_abs_diff(tr.last(), &want) < 1e-12);
        let p = predict_stationary(&g, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.kind, StationaryKind::Fixed);
        assert!(max_abs_diff(&p.vectors[0], &want) < 1e-15);
        let (tr, at) =
            random_walk_until_converged(&four_node_unbalanced(), &[1.0, 0.0, 0.0, 0.0], 2000, WALK_TOL).unwrap();
        assert!(at.is_some());
        assert!(tr.last().iter().all(|x| x.abs() < 1e-9));
    }

    #[test]
    fn stationary_orthogonal_start_is_zero() {
        let g = triangle([1.0; 3]);
        let p = predict_stationary(&g, &[1.0, -1.0, 0.0]).unwrap();
        assert!(p.vectors[0].iter().all(|&x| x == 0.0));
        let c4 = SignedGraph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)]).unwrap();
        assert_eq!(predict_stationary(&c4, &[1.0, 0.0, 0.0, 0.0]), Err(DynamicsError::BipartiteUnsupported));
    }

    #[test]
    fn alternating_pair() {
        let g = triangle([-1.0; 3]);
        let p = predict_stationary(&g, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.kind, StationaryKind::AlternatingPair);
        for (a, b) in p.vectors[0].iter().zip(&p.vectors[1]) {
            assert_eq!(*a, -*b);
        }
        let tr = random_walk_simulate(&g, &[1.0, 0.0, 0.0], 81).unwrap();
        assert!(max_abs_diff(&tr.states[81], p.at(81)) < 1e-12);
        assert!(max_abs_diff(&tr.states[80], p.at(80)) < 1e-12);
    }

    #[test]
    fn sign_patterns() {
        let g = triangle([-1.0, 1.0, -1.0]);
        for t in 0..6 {
            let c = transition_power_sign_pattern(&g, t).unwrap();
            assert_eq!(c.mismatches, 0);
            assert!(c.magnitude_deviation < 1e-14);
        }
        let c = transition_power_sign_pattern(&triangle([-1.0; 3]), 1).unwrap();
        assert_eq!(c.predicted[0][1], -1);
        assert_eq!(c.mismatches, 0);
        assert!(matches!(
            transition_power_sign_pattern(&four_node_unbalanced(), 2),
            Err(DynamicsError::WrongVerdict(_))
        ));
    }

    #[test]
    fn rank1_identity_case() {
        let g = triangle([1.0, -1.0, -1.0]);
        let err = g.adjacency().pow(0).sub(&rank1_approximation(&g, 0).unwrap()).frobenius_norm();
        assert!((err - 2f64.sqrt()).abs() < 1e-12);
        assert!((rank1_error_prediction(&g, 0).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn doubled_walk_basics() {
        let g = triangle([1.0; 3]);
        let d = doubled_walk_simulate(&g, &[1.0, 0.0, 0.0], &[0.0; 3], 10).unwrap();
        assert!(d.minus.states.iter().flatten().all(|&x| x == 0.0));
        assert!(matches!(
            doubled_walk_simulate(&g, &[1.0, 0.0, 0.0], &[0.0, -0.1, 0.0], 1),
            Err(DynamicsError::NegativeDensity { node: 1, .. })
        ));
    }

    #[test]
    fn elt_small_cases() {
        let g = triangle([0.1; 3]);
        let cfg = EltConfig::lattice(2.0, 0.1, 1.0, 4);
        let (tr, sets) = elt_simulate(&g, &[0.0; 3], &cfg).unwrap();
        assert!(tr.states.iter().flatten().all(|&x| x == 0.0));
        assert_eq!(sets.active_count(0), 0);
        // single node at l0 cannot reach θ₁ = 0.2 through weights 0.1
        let (tr, _) = elt_simulate(&g, &[1.0, 0.0, 0.0], &cfg).unwrap();
        assert!(tr.states[1].iter().all(|&x| x == 0.0));
        let bad = EltConfig { theta_l: 0.0, ..cfg.clone() };
        assert!(matches!(elt_simulate(&g, &[0.0; 3], &bad), Err(DynamicsError::NonpositiveParameter("theta_l"))));
        let table = EltConfig { general_thresholds: Some(vec![vec![1.0, 1.0, -1.0]; 4]), ..cfg };
        assert!(matches!(
            elt_simulate(&g, &[0.0; 3], &table),
            Err(DynamicsError::NonpositiveThreshold { node: 2, t: 1 })
        ));
    }

    #[test]
    fn lattice_detection() {
        let path = SignedGraph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(matches!(certain_propagation_check(&path, 1.0), Err(DynamicsError::NotLattice(_))));
        // the triangle is the ring lattice with n = 3, d̄ = 2
        assert_eq!(lattice_shape(&triangle([1.0; 3])).unwrap(), (2, 1.0));
        let n = 10;
        let ring = SignedGraph::new(n, (0..n).flat_map(|i| [(i, (i + 1) % n, 0.1), (i, (i + 2) % n, -0.1)])).unwrap();
        assert_eq!(lattice_shape(&ring).unwrap().0, 4);
        assert!(certain_propagation_check(&ring, 2.0).unwrap());
        assert!(!certain_propagation_check(&ring, 2.01).unwrap());
    }
}
