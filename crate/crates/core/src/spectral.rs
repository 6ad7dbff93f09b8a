//! Symmetric spectra and the spectral characterisations of balance:
//! spectrum comparison against the unsigned counterpart, leading eigenvector
//! patterns, the distances `d_b`/`d_a`, Perron vectors of balanced walks and
//! first-order perturbation estimates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balance::{self, BalanceClassification, Bipartition, Target, Verdict};
use crate::eigen;
use crate::graph::SignedGraph;
use crate::matrix::DenseMatrix;

/// Absolute asymmetry tolerance, scaled by `max(1, max|M_ij|)`.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Eigenvalues closer than this are treated as one eigenspace.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("operation needs a {needed} graph, verdict is {got:?}")]
    WrongVerdict { needed: &'static str, got: Verdict },
    #[error("unsigned counterpart is bipartite; leading pattern is ambiguous (see bipartite_patterns)")]
    Bipartite,
    #[error("unsigned counterpart is not bipartite")]
    NotBipartite,
    #[error("graph is not balanced with the given certificate")]
    NotBalanced,
    #[error("edge ({0}, {1}) is not present")]
    EdgeNotPresent(usize, usize),
    #[error(transparent)]
    Balance(#[from] balance::BalanceError),
}

/// Eigenvalues in descending order; column `k` of `vectors` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn spectral_radius(&self) -> f64 {
        self.max().abs().max(self.min().abs())
    }

    /// `U Λ Uᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.len();
        let u = &self.vectors;
        DenseMatrix::from_fn(n, n, |i, j| (0..n).map(|k| u[(i, k)] * self.values[k] * u[(j, k)]).sum())
    }

    /// Runs of indices whose consecutive eigenvalues differ by less than `tol`.
    pub fn clusters(&self, tol: f64) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for k in 1..=self.len() {
            if k == self.len() || self.values[k - 1] - self.values[k] >= tol {
                out.push(start..k);
                start = k;
            }
        }
        out
    }

    /// Orthogonal projector onto the span of the given eigenvectors.
    pub fn projector(&self, range: std::ops::Range<usize>) -> DenseMatrix {
        let n = self.vectors.rows();
        let u = &self.vectors;
        DenseMatrix::from_fn(n, n, |i, j| range.clone().map(|k| u[(i, k)] * u[(j, k)]).sum())
    }
}

/// Eigendecomposition of a symmetric matrix. Each eigenvector is oriented so
/// its largest-magnitude entry is positive, the lowest such index winning ties.
pub fn eigendecompose_symmetric(m: &DenseMatrix) -> Result<Spectrum, SpectralError> {
    let asym = m.asymmetry();
    if asym > SYMMETRY_TOL * m.max_abs().max(1.0) {
        return Err(SpectralError::NotSymmetric(asym));
    }
    // average away any admissible asymmetry
    let sym = DenseMatrix::from_fn(m.rows(), m.cols(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let (vals, vecs) = eigen::symmetric_eigen(&sym).ok_or(SpectralError::NoConvergence)?;
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let values: Vec<f64> = order.iter().map(|&k| vals[k]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = vecs.column(k);
        let big = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let lead = v.iter().position(|x| x.abs() >= big * (1.0 - 1e-12)).unwrap_or(0);
        let sign = if v[lead] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors[(i, col)] = sign * v[i];
        }
    }
    Ok(Spectrum { values, vectors })
}

/// Eigenvalues of `P = D⁻¹W`, computed through the similar matrix `P_sym`.
pub fn transition_spectrum(g: &SignedGraph) -> Result<Spectrum, SpectralError> {
    eigendecompose_symmetric(&g.symmetrized_transition())
}

/// Deviations between the spectra of `W` and `W̄` predicted by switching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralDeviation {
    /// Max `|λ_k - λ̄_k|` (balanced) or `|λ_k + λ̄_{n+1-k}|` (antibalanced).
    pub eigenvalues: f64,
    /// Max entrywise `||u_k| - |ū_k'||` over simple eigenvalues, or max entry
    /// of the projector difference `U_c U_cᵀ - I₁ Ū_c Ū_cᵀ I₁` over clusters.
    pub eigenvectors: f64,
    /// Same as `eigenvectors`, restricted to the leading unsigned eigenvector.
    pub leading_vector: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralTheoremReport {
    pub balanced: Option<SpectralDeviation>,
    pub antibalanced: Option<SpectralDeviation>,
}

impl SpectralTheoremReport {
    pub fn max_eigenvalue_deviation(&self) -> f64 {
        [self.balanced, self.antibalanced].iter().flatten().fold(0.0, |m, d| m.max(d.eigenvalues))
    }

    pub fn max_eigenvector_deviation(&self) -> f64 {
        [self.balanced, self.antibalanced].iter().flatten().fold(0.0, |m, d| m.max(d.eigenvectors))
    }
}

fn deviation(signed: &Spectrum, unsigned: &Spectrum, s: &Bipartition, reversed: bool) -> SpectralDeviation {
    let n = signed.len();
    // index in the signed spectrum paired with unsigned index k
    let pair = |k: usize| if reversed { n - 1 - k } else { k };
    let mut ev: f64 = 0.0;
    for k in 0..n {
        let expected = if reversed { -unsigned.values[k] } else { unsigned.values[k] };
        ev = ev.max((signed.values[pair(k)] - expected).abs());
    }
    let mut vec_dev: f64 = 0.0;
    let mut leading = None;
    for c in unsigned.clusters(DEGENERACY_TOL) {
        let d = if c.len() == 1 {
            let k = c.start;
            let u = signed.vector(pair(k));
            let ub = unsigned.vector(k);
            u.iter().zip(&ub).fold(0.0f64, |m, (a, b)| m.max((a.abs() - b.abs()).abs()))
        } else {
            let sc = if reversed { n - c.end..n - c.start } else { c.clone() };
            let ps = signed.projector(sc);
            let pu = unsigned.projector(c.clone());
            let pu = DenseMatrix::from_fn(n, n, |i, j| s.sign(i) * pu[(i, j)] * s.sign(j));
            ps.max_abs_diff(&pu)
        };
        if c.start == 0 && c.len() == 1 {
            leading = Some(d);
        }
        vec_dev = vec_dev.max(d);
    }
    SpectralDeviation { eigenvalues: ev, eigenvectors: vec_dev, leading_vector: leading }
}

/// Compares the spectrum of `W` with that of `W̄` for a balanced and/or
/// antibalanced graph.
pub fn verify_spectral_theorem(
    g: &SignedGraph,
    c: &BalanceClassification,
) -> Result<SpectralTheoremReport, SpectralError> {
    if c.verdict == Verdict::StrictlyUnbalanced {
        return Err(SpectralError::WrongVerdict { needed: "balanced or antibalanced", got: c.verdict });
    }
    let signed = eigendecompose_symmetric(&g.adjacency())?;
    let unsigned = eigendecompose_symmetric(&g.unsigned_counterpart().adjacency())?;
    let balanced = c.balanced_partition.as_ref().map(|s| deviation(&signed, &unsigned, s, false));
    let antibalanced = c.antibalanced_partition.as_ref().map(|s| deviation(&signed, &unsigned, s, true));
    Ok(SpectralTheoremReport { balanced, antibalanced })
}

/// Sign pattern of `u₁` (balanced) or `uₙ` (antibalanced) of `W`, normalised
/// to `s₀ = +1`.
pub fn leading_eigenpair_pattern(g: &SignedGraph, c: &BalanceClassification) -> Result<Bipartition, SpectralError> {
    if g.is_bipartite() {
        return Err(SpectralError::Bipartite);
    }
    let k = match c.verdict {
        Verdict::Balanced => 0,
        Verdict::Antibalanced => g.n() - 1,
        // Both only occurs on bipartite graphs, handled above
        v => return Err(SpectralError::WrongVerdict { needed: "balanced or antibalanced", got: v }),
    };
    let spec = eigendecompose_symmetric(&g.adjacency())?;
    Ok(Bipartition::from_pattern(&spec.vector(k)).normalized())
}

/// Patterns for a graph whose unsigned counterpart is bipartite, where
/// `λ₁ = -λₙ` and both extreme eigenvectors carry structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartitePatterns {
    /// Two-colouring of the underlying graph.
    pub parts: Bipartition,
    /// Sign pattern of `u₁`.
    pub balanced: Bipartition,
    /// `parts ⊙ balanced`, which matches the sign pattern of `uₙ`.
    pub antibalanced: Bipartition,
    /// Sign pattern of `uₙ`, kept for comparison.
    pub trailing: Bipartition,
    /// Whether `λ₁ + λₙ` vanishes (always true for a connected bipartite graph).
    pub degenerate_pair: bool,
}

/// Fallback for balanced graphs with bipartite unsigned counterpart.
pub fn bipartite_patterns(g: &SignedGraph) -> Result<BipartitePatterns, SpectralError> {
    let colours = g.two_colouring().ok_or(SpectralError::NotBipartite)?;
    let parts = Bipartition::new(colours)?;
    let c = balance::classify(g);
    if !c.verdict.is_balanced() {
        return Err(SpectralError::NotBalanced);
    }
    let spec = eigendecompose_symmetric(&g.adjacency())?;
    let balanced = Bipartition::from_pattern(&spec.vector(0)).normalized();
    let trailing = Bipartition::from_pattern(&spec.vector(g.n() - 1)).normalized();
    let antibalanced = balance::antibalanced_partition_from_bipartite(g, &parts, &balanced)?.normalized();
    let degenerate_pair = (spec.max() + spec.min()).abs() < 1e-9 * spec.spectral_radius().max(1.0);
    Ok(BipartitePatterns { parts, balanced, antibalanced, trailing, degenerate_pair })
}

/// Spectral distances from balance and antibalance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalanceMeasures {
    /// `λ_min(L_rw) = 1 - λ_max(P)`.
    pub d_b: f64,
    /// `2 - λ_max(L_rw) = 1 + λ_min(P)`.
    pub d_a: f64,
    /// `ρ(W)`.
    pub rho_signed: f64,
    /// `ρ(W̄)`.
    pub rho_unsigned: f64,
    /// `ρ(W̄) - ρ(W)`, positive exactly on strictly unbalanced graphs.
    pub contraction: f64,
}

pub fn strict_unbalance_contraction(g: &SignedGraph) -> Result<BalanceMeasures, SpectralError> {
    let p = transition_spectrum(g)?;
    let rho_signed = eigendecompose_symmetric(&g.adjacency())?.spectral_radius();
    let rho_unsigned = eigendecompose_symmetric(&g.unsigned_counterpart().adjacency())?.spectral_radius();
    Ok(BalanceMeasures {
        d_b: 1.0 - p.max(),
        d_a: 1.0 + p.min(),
        rho_signed,
        rho_unsigned,
        contraction: rho_unsigned - rho_signed,
    })
}

/// Tolerance for the eigenpair checks in [`perron_vectors_balanced`].
pub const PERRON_TOL: f64 = 1e-10;

/// Right and left eigenvectors of `P` at eigenvalue 1 for a balanced graph:
/// `u = s` and `w = s ⊙ d`.
pub fn perron_vectors_balanced(g: &SignedGraph, b: &Bipartition) -> Result<(Vec<f64>, Vec<f64>), SpectralError> {
    if balance::first_violation(g, b, Target::Balanced)?.is_some() {
        return Err(SpectralError::NotBalanced);
    }
    let d = g.degree_vector().d;
    let u = b.as_vector();
    let w: Vec<f64> = u.iter().zip(&d).map(|(s, d)| s * d).collect();
    let p = g.transition_matrix();
    let right = p.mul_vec(&u);
    let left = p.vec_mul(&w);
    let dmax = d.iter().fold(1.0f64, |m, x| m.max(*x));
    let ok_r = right.iter().zip(&u).all(|(a, b)| (a - b).abs() < PERRON_TOL);
    let ok_l = left.iter().zip(&w).all(|(a, b)| (a - b).abs() < PERRON_TOL * dmax);
    if !(ok_r && ok_l) {
        return Err(SpectralError::NotBalanced);
    }
    Ok((u, w))
}

/// First-order shift of an extreme eigenvalue of `P` after flipping edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationEstimate {
    pub target: Target,
    /// Balanced: predicted `Δ_max = -2 Σ|W_ij| / m`.
    /// Antibalanced: predicted `Δ_min = +2 Σ|W_ij| / m`.
    pub predicted: f64,
    /// Balanced: `λ_max(P(G')) - 1`. Antibalanced: `λ_min(P(G')) + 1`.
    pub realized: f64,
    /// `Σ |W_ij|` over the flipped edges.
    pub flipped_weight: f64,
    /// Half the total degree.
    pub m: f64,
}

impl PerturbationEstimate {
    /// Predicted `d_b` (or `d_a`) of the flipped graph.
    pub fn predicted_distance(&self) -> f64 {
        self.predicted.abs()
    }

    pub fn realized_distance(&self) -> f64 {
        self.realized.abs()
    }
}

fn flip_edges(g: &SignedGraph, flip_set: &[(usize, usize)]) -> Result<(SignedGraph, f64), SpectralError> {
    let mut weight = 0.0;
    for &(i, j) in flip_set {
        let w = if i < g.n() && j < g.n() { g.weight(i, j) } else { 0.0 };
        if w == 0.0 {
            return Err(SpectralError::EdgeNotPresent(i, j));
        }
        weight += w.abs();
    }
    let key = |i: usize, j: usize| (i.min(j), i.max(j));
    let set: std::collections::HashSet<_> = flip_set.iter().map(|&(i, j)| key(i, j)).collect();
    let flipped = g.map_weights(|e| if set.contains(&key(e.i, e.j)) { -e.w } else { e.w });
    Ok((flipped, weight))
}

/// Flips `flip_set` in the balanced graph `g_b` and compares the realized
/// `λ_max(P)` shift with the first-order prediction.
pub fn perturbation_estimate(
    g_b: &SignedGraph,
    flip_set: &[(usize, usize)],
) -> Result<PerturbationEstimate, SpectralError> {
    if !balance::classify(g_b).verdict.is_balanced() {
        return Err(SpectralError::NotBalanced);
    }
    let (flipped, flipped_weight) = flip_edges(g_b, flip_set)?;
    let m = g_b.degree_vector().m();
    let realized = transition_spectrum(&flipped)?.max() - 1.0;
    Ok(PerturbationEstimate {
        target: Target::Balanced,
        predicted: -2.0 * flipped_weight / m,
        realized,
        flipped_weight,
        m,
    })
}

/// Antibalanced dual of [`perturbation_estimate`], evaluated on the negated graph.
pub fn perturbation_estimate_antibalanced(
    g_a: &SignedGraph,
    flip_set: &[(usize, usize)],
) -> Result<PerturbationEstimate, SpectralError> {
    let dual = perturbation_estimate(&g_a.negate(), flip_set)?;
    Ok(PerturbationEstimate {
        target: Target::Antibalanced,
        predicted: -dual.predicted,
        realized: -dual.realized,
        ..dual
    })
}
