//! Seeded generators: signed stochastic block model, signed ring lattices and
//! random recursive signed trees. All use ChaCha8 seeded from a `u64`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balance::Bipartition;
use crate::graph::{Edge, GraphError, SignedGraph};

/// Connectivity resampling budget for the block model.
pub const MAX_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("no connected sample after {0} attempts")]
    GaveUpConnectivity(usize),
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_prob(name: &str, p: f64) -> Result<(), GenerateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GenerateError::ParamOutOfRange(format!("{name} = {p} is not in [0, 1]")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<(), GenerateError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(GenerateError::ParamOutOfRange(format!("alpha = {alpha} must be positive")));
    }
    Ok(())
}

/// Two-block signed stochastic block model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SsbmParams {
    pub n1: usize,
    pub n2: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub eta: f64,
    pub alpha: f64,
    #[serde(default)]
    pub seed: u64,
}

impl SsbmParams {
    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    /// Block membership: `+1` for the first `n1` nodes.
    pub fn planted_bipartition(&self) -> Bipartition {
        let s = (0..self.n()).map(|i| if i < self.n1 { 1 } else { -1 }).collect();
        Bipartition::new(s).expect("entries are ±1")
    }

    fn validate(&self) -> Result<(), GenerateError> {
        if self.n() < 2 {
            return Err(GenerateError::ParamOutOfRange(format!("n1 + n2 = {} must be at least 2", self.n())));
        }
        check_prob("p_in", self.p_in)?;
        check_prob("p_out", self.p_out)?;
        check_prob("eta", self.eta)?;
        check_alpha(self.alpha)
    }
}

/// Within-block pairs get `+α` with probability `p_in`, cross pairs `-α` with
/// probability `p_out`; each realized sign then flips with probability `η`.
/// Disconnected draws are redrawn from the same stream.
pub fn ssbm(params: &SsbmParams) -> Result<SignedGraph, GenerateError> {
    params.validate()?;
    let n = params.n();
    let mut rng = rng(params.seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let same = (i < params.n1) == (j < params.n1);
                let p = if same { params.p_in } else { params.p_out };
                if rng.random::<f64>() < p {
                    let mut w = if same { params.alpha } else { -params.alpha };
                    if rng.random::<f64>() < params.eta {
                        w = -w;
                    }
                    edges.push(Edge::new(i, j, w));
                }
            }
        }
        match SignedGraph::new(n, edges) {
            Ok(g) => return Ok(g),
            Err(GraphError::Disconnected(_)) => continue,
            Err(e) => unreachable!("generator produced an invalid edge: {e}"),
        }
    }
    Err(GenerateError::GaveUpConnectivity(MAX_ATTEMPTS))
}

/// How lattice nodes are split into `V₁`/`V₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BipartitionRule {
    /// Every node in `V₁`.
    Uniform,
    /// Nodes `start, …, start+len-1` (mod n) in `V₂`.
    Arc { start: usize, len: usize },
    /// Consecutive blocks of `block` nodes alternate between `V₁` and `V₂`.
    AlternatingBlocks { block: usize },
}

impl BipartitionRule {
    pub fn bipartition(&self, n: usize) -> Result<Bipartition, GenerateError> {
        let s: Vec<i8> = match *self {
            BipartitionRule::Uniform => vec![1; n],
            BipartitionRule::Arc { start, len } => {
                if len > n {
                    return Err(GenerateError::ParamOutOfRange(format!("arc length {len} exceeds n = {n}")));
                }
                let mut s = vec![1; n];
                for k in 0..len {
                    s[(start + k) % n] = -1;
                }
                s
            }
            BipartitionRule::AlternatingBlocks { block } => {
                if block == 0 {
                    return Err(GenerateError::ParamOutOfRange("block size must be positive".into()));
                }
                (0..n).map(|i| if (i / block) % 2 == 0 { 1 } else { -1 }).collect()
            }
        };
        Ok(Bipartition::new(s).expect("entries are ±1"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignPlan {
    /// Positive inside parts, negative across.
    Balanced { rule: BipartitionRule },
    /// Negative inside parts, positive across.
    Antibalanced { rule: BipartitionRule },
    /// A balanced plan with `k` distinct edges flipped at random.
    FlipK { k: usize, seed: u64, rule: BipartitionRule },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeParams {
    pub n: usize,
    pub dbar: usize,
    pub alpha: f64,
    pub sign_plan: SignPlan,
}

/// Circulant ring lattice: node `i` joined to `i+1, …, i+d̄/2` (mod n).
/// Edges are listed by `i`, then by offset.
pub fn ring_lattice(params: &LatticeParams) -> Result<SignedGraph, GenerateError> {
    let LatticeParams { n, dbar, alpha, .. } = *params;
    if dbar % 2 == 1 || dbar < 2 || dbar >= n {
        return Err(GenerateError::ParamOutOfRange(format!("dbar = {dbar} must be even with 2 <= dbar < n = {n}")));
    }
    check_alpha(alpha)?;
    let (rule, orient) = match &params.sign_plan {
        SignPlan::Balanced { rule } | SignPlan::FlipK { rule, .. } => (rule, 1.0),
        SignPlan::Antibalanced { rule } => (rule, -1.0),
    };
    let s = rule.bipartition(n)?;
    let mut edges = Vec::with_capacity(n * dbar / 2);
    for i in 0..n {
        for k in 1..=dbar / 2 {
            let j = (i + k) % n;
            edges.push(Edge::new(i, j, orient * s.sign(i) * s.sign(j) * alpha));
        }
    }
    if let SignPlan::FlipK { k, seed, .. } = params.sign_plan {
        if k > edges.len() {
            return Err(GenerateError::ParamOutOfRange(format!("k = {k} exceeds the {} edges", edges.len())));
        }
        let mut rng = rng(seed);
        let mut picked = sample(&mut rng, edges.len(), k).into_vec();
        picked.sort_unstable();
        for e in picked {
            edges[e].w = -edges[e].w;
        }
    }
    Ok(SignedGraph::new(n, edges).expect("ring lattices are connected and simple"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeParams {
    pub n: usize,
    pub sign_prob: f64,
    #[serde(default)]
    pub seed: u64,
}

/// Random recursive tree: node `k` attaches to a uniform earlier node. Each
/// edge has weight `-1` with probability `sign_prob`, else `+1`.
pub fn random_signed_tree(n: usize, sign_prob: f64, seed: u64) -> Result<SignedGraph, GenerateError> {
    if n == 0 {
        return Err(GenerateError::ParamOutOfRange("n must be at least 1".into()));
    }
    check_prob("sign_prob", sign_prob)?;
    let mut rng = rng(seed);
    let edges: Vec<Edge> = (1..n)
        .map(|k| {
            let parent = rng.random_range(0..k);
            let w = if rng.random::<f64>() < sign_prob { -1.0 } else { 1.0 };
            Edge::new(parent, k, w)
        })
        .collect();
    Ok(SignedGraph::new(n, edges).expect("trees are connected"))
}
