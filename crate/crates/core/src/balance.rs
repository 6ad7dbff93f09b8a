//! Exact balance classification, switching, sign-conflicting walks and
//! frustration (distance to the nearest balanced or antibalanced signing).

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, SignedGraph};
use crate::spectral;

/// Largest node count accepted by exhaustive frustration search.
pub const MAX_EXACT_NODES: usize = 25;

/// Eigenvector entries below this magnitude are read as `+1`.
pub const PATTERN_ZERO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BalanceError {
    #[error("sign vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("sign vector entry {0} is not +1 or -1")]
    InvalidSign(usize),
    #[error("graph is not bipartite with the given parts (edge ({i}, {j}))")]
    NotBipartite { i: usize, j: usize },
    #[error("graph is not balanced with the given parts (edge ({i}, {j}))")]
    NotBalanced { i: usize, j: usize },
    #[error("exact frustration is limited to {max} nodes, graph has {n}")]
    TooLarge { n: usize, max: usize },
    #[error("eigendecomposition failed: {0}")]
    Spectral(String),
}

/// Two-way split of the node set as a sign vector, `s_i = +1` for `V₁`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct Bipartition {
    s: Vec<i8>,
}

impl TryFrom<Vec<i8>> for Bipartition {
    type Error = BalanceError;

    fn try_from(s: Vec<i8>) -> Result<Self, BalanceError> {
        if let Some(k) = s.iter().position(|&x| x != 1 && x != -1) {
            return Err(BalanceError::InvalidSign(k));
        }
        Ok(Bipartition { s })
    }
}

impl From<Bipartition> for Vec<i8> {
    fn from(b: Bipartition) -> Vec<i8> {
        b.s
    }
}

impl Bipartition {
    pub fn new(s: Vec<i8>) -> Result<Self, BalanceError> {
        Self::try_from(s)
    }

    /// Everything in `V₁`.
    pub fn uniform(n: usize) -> Self {
        Bipartition { s: vec![1; n] }
    }

    /// Sign pattern of a real vector; entries with `|x| < PATTERN_ZERO_TOL` map to `+1`.
    pub fn from_pattern(x: &[f64]) -> Self {
        Bipartition { s: x.iter().map(|&v| if v.abs() < PATTERN_ZERO_TOL || v > 0.0 { 1 } else { -1 }).collect() }
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.s
    }

    pub fn sign(&self, i: usize) -> f64 {
        f64::from(self.s[i])
    }

    /// `𝟙₁` as a real vector.
    pub fn as_vector(&self) -> Vec<f64> {
        self.s.iter().map(|&x| f64::from(x)).collect()
    }

    /// Representative with `s₀ = +1`.
    pub fn normalized(&self) -> Self {
        if self.s.first() == Some(&-1) {
            self.negated()
        } else {
            self.clone()
        }
    }

    pub fn negated(&self) -> Self {
        Bipartition { s: self.s.iter().map(|&x| -x).collect() }
    }

    /// Entrywise product.
    pub fn product(&self, other: &Bipartition) -> Self {
        Bipartition { s: self.s.iter().zip(&other.s).map(|(a, b)| a * b).collect() }
    }

    /// Equal up to global negation.
    pub fn equivalent(&self, other: &Bipartition) -> bool {
        self.normalized() == other.normalized()
    }

    fn check_len(&self, n: usize) -> Result<(), BalanceError> {
        if self.s.len() != n {
            return Err(BalanceError::DimensionMismatch { expected: n, got: self.s.len() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Balanced,
    Antibalanced,
    Both,
    StrictlyUnbalanced,
}

impl Verdict {
    pub fn is_balanced(self) -> bool {
        matches!(self, Verdict::Balanced | Verdict::Both)
    }

    pub fn is_antibalanced(self) -> bool {
        matches!(self, Verdict::Antibalanced | Verdict::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceClassification {
    pub verdict: Verdict,
    pub balanced_partition: Option<Bipartition>,
    pub antibalanced_partition: Option<Bipartition>,
}

/// Which structure a frustration count or perturbation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Balanced,
    Antibalanced,
}

impl Target {
    fn orientation(self) -> f64 {
        match self {
            Target::Balanced => 1.0,
            Target::Antibalanced => -1.0,
        }
    }
}

/// Edge `(i, j, w)` violates `target` under `s` when `sign(w)·s_i·s_j` has
/// the wrong sign.
fn violates(target: Target, w: f64, si: i8, sj: i8) -> bool {
    target.orientation() * w.signum() * f64::from(si * sj) < 0.0
}

/// Propagate `s_j = o·sign(W_ij)·s_i` from node 0; `None` on a conflict.
fn propagate(g: &SignedGraph, target: Target) -> Option<Bipartition> {
    let o = target.orientation();
    let mut s = vec![0i8; g.n()];
    s[0] = 1;
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        for &(v, w) in g.neighbours(u) {
            let want = if o * w > 0.0 { s[u] } else { -s[u] };
            if s[v] == 0 {
                s[v] = want;
                queue.push_back(v);
            } else if s[v] != want {
                return None;
            }
        }
    }
    Some(Bipartition { s })
}

/// Exact verdict by sign propagation over a BFS tree rooted at node 0.
/// Certificates are normalised to `s₀ = +1`.
pub fn classify(g: &SignedGraph) -> BalanceClassification {
    let balanced_partition = propagate(g, Target::Balanced);
    let antibalanced_partition = propagate(g, Target::Antibalanced);
    let verdict = match (&balanced_partition, &antibalanced_partition) {
        (Some(_), Some(_)) => Verdict::Both,
        (Some(_), None) => Verdict::Balanced,
        (None, Some(_)) => Verdict::Antibalanced,
        (None, None) => Verdict::StrictlyUnbalanced,
    };
    BalanceClassification { verdict, balanced_partition, antibalanced_partition }
}

/// First edge violating `target` under `b`, if any.
pub fn first_violation(g: &SignedGraph, b: &Bipartition, target: Target) -> Result<Option<Edge>, BalanceError> {
    b.check_len(g.n())?;
    Ok(g.edges().iter().copied().find(|e| violates(target, e.w, b.s[e.i], b.s[e.j])))
}

/// `W'_ij = s_i s_j W_ij`.
pub fn switch(g: &SignedGraph, b: &Bipartition) -> Result<SignedGraph, BalanceError> {
    b.check_len(g.n())?;
    Ok(g.map_weights(|e| f64::from(b.s[e.i] * b.s[e.j]) * e.w))
}

/// For a graph that is bipartite with parts `b_bipartite` and balanced with
/// parts `b_balanced`, returns the antibalanced partition `s_p ⊙ s_b`.
pub fn antibalanced_partition_from_bipartite(
    g: &SignedGraph,
    b_bipartite: &Bipartition,
    b_balanced: &Bipartition,
) -> Result<Bipartition, BalanceError> {
    b_bipartite.check_len(g.n())?;
    b_balanced.check_len(g.n())?;
    if let Some(e) = g.edges().iter().find(|e| b_bipartite.s[e.i] == b_bipartite.s[e.j]) {
        return Err(BalanceError::NotBipartite { i: e.i, j: e.j });
    }
    if let Some(e) = first_violation(g, b_balanced, Target::Balanced)? {
        return Err(BalanceError::NotBalanced { i: e.i, j: e.j });
    }
    Ok(b_bipartite.product(b_balanced))
}

/// Node pair joined by a positive and a negative walk of the same length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkWitness {
    pub i: usize,
    pub j: usize,
    pub length: usize,
}

/// Searches lengths `1..=l_max` for a pair `(i, j)` joined by walks of both
/// signs. Reachability is tracked in the boolean semiring; the first witness in
/// `(length, i, j)` order is returned.
pub fn sign_conflicting_walk(g: &SignedGraph, l_max: usize) -> Option<WalkWitness> {
    let n = g.n();
    // pos[i][j]: some walk of the current length from i to j is positive
    let mut pos = vec![vec![false; n]; n];
    let mut neg = vec![vec![false; n]; n];
    for i in 0..n {
        pos[i][i] = true;
    }
    for length in 1..=l_max {
        let mut next_pos = vec![vec![false; n]; n];
        let mut next_neg = vec![vec![false; n]; n];
        for i in 0..n {
            for k in 0..n {
                if !pos[i][k] && !neg[i][k] {
                    continue;
                }
                for &(j, w) in g.neighbours(k) {
                    let (same, flip) =
                        if w > 0.0 { (&mut next_pos, &mut next_neg) } else { (&mut next_neg, &mut next_pos) };
                    if pos[i][k] {
                        same[i][j] = true;
                    }
                    if neg[i][k] {
                        flip[i][j] = true;
                    }
                }
            }
        }
        pos = next_pos;
        neg = next_neg;
        for i in 0..n {
            for j in 0..n {
                if pos[i][j] && neg[i][j] {
                    return Some(WalkWitness { i, j, length });
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrustrationMode {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrustrationReport {
    pub target: Target,
    /// Bipartition the count refers to, normalised to `s₀ = +1`.
    pub partition: Bipartition,
    /// Edges whose sign must flip to reach `target`.
    pub flip_set: Vec<Edge>,
    pub flip_count: usize,
    /// `Σ |W_ij|` over the flip set.
    pub flipped_weight: f64,
    /// True when the count is the exhaustive minimum.
    pub exact: bool,
}

fn report(g: &SignedGraph, target: Target, partition: Bipartition, exact: bool) -> FrustrationReport {
    let flip_set: Vec<Edge> =
        g.edges().iter().copied().filter(|e| violates(target, e.w, partition.s[e.i], partition.s[e.j])).collect();
    FrustrationReport {
        target,
        flip_count: flip_set.len(),
        flipped_weight: flip_set.iter().map(|e| e.w.abs()).sum(),
        flip_set,
        partition,
        exact,
    }
}

/// Minimum number of sign flips reaching `target`, exhaustively over the
/// `2^(n-1)` bipartitions with `s₀ = +1` (exact) or read off the sign pattern
/// of the extreme eigenvector of `W` (heuristic upper bound).
///
/// Exact ties are broken towards the lexicographically smallest sign vector
/// under the order `+1 < -1`.
pub fn frustration(g: &SignedGraph, target: Target, mode: FrustrationMode) -> Result<FrustrationReport, BalanceError> {
    match mode {
        FrustrationMode::Exact => exact_frustration(g, target),
        FrustrationMode::Heuristic => {
            let spec = spectral::eigendecompose_symmetric(&g.adjacency())
                .map_err(|e| BalanceError::Spectral(e.to_string()))?;
            let k = match target {
                Target::Balanced => 0,
                Target::Antibalanced => g.n() - 1,
            };
            let b = Bipartition::from_pattern(&spec.vector(k)).normalized();
            Ok(report(g, target, b, false))
        }
    }
}

fn exact_frustration(g: &SignedGraph, target: Target) -> Result<FrustrationReport, BalanceError> {
    let n = g.n();
    if n > MAX_EXACT_NODES {
        return Err(BalanceError::TooLarge { n, max: MAX_EXACT_NODES });
    }
    // Gray-code walk over nodes 1..n; bit k of the code is node k+1 at -1.
    // The lexicographic key puts node 1 in the most significant position.
    let free = n - 1;
    let mut s = vec![1i8; n];
    let mut count = g.edges().iter().filter(|e| violates(target, e.w, s[e.i], s[e.j])).count();
    let mut key: u64 = 0;
    let mut best = (count, key);
    for step in 1u64..(1u64 << free) {
        let bit = step.trailing_zeros() as usize;
        let v = bit + 1;
        for &(u, w) in g.neighbours(v) {
            if violates(target, w, s[u], s[v]) {
                count -= 1;
            } else {
                count += 1;
            }
        }
        s[v] = -s[v];
        key ^= 1u64 << (free - v);
        if (count, key) < best {
            best = (count, key);
        }
    }
    let (_, key) = best;
    let mut s = vec![1i8; n];
    for (v, sv) in s.iter_mut().enumerate().skip(1) {
        if key >> (free - v) & 1 == 1 {
            *sv = -1;
        }
    }
    Ok(report(g, target, Bipartition { s }, true))
}
