//! Test-only oracles. Nothing here calls into the code under test except to
#![allow(clippy::needless_range_loop)]
//! build graphs.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use signbal::{DenseMatrix, Edge, SignedGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random connected signed graph on `n` nodes: a random spanning tree plus
/// each other pair with probability `p`, signs fair, magnitudes in [0.1, 2).
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, p: f64) -> SignedGraph {
    let mut edges = Vec::new();
    let mut present = vec![vec![false; n]; n];
    for k in 1..n {
        let parent = rng.random_range(0..k);
        present[parent][k] = true;
        present[k][parent] = true;
    }
    for i in 0..n {
        for j in i + 1..n {
            if present[i][j] || rng.random::<f64>() < p {
                let mag = rng.random_range(0.1..2.0);
                let w = if rng.random::<bool>() { mag } else { -mag };
                edges.push(Edge::new(i, j, w));
            }
        }
    }
    SignedGraph::new(n, edges).unwrap()
}

/// Random connected graph with arbitrary topology (rejection sampling over
/// independent edge draws), used where spanning-tree bias is unwanted.
pub fn random_connected_uniform(rng: &mut ChaCha8Rng, n: usize, p: f64) -> SignedGraph {
    loop {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    let w = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    edges.push(Edge::new(i, j, w * rng.random_range(0.5..1.5)));
                }
            }
        }
        if let Ok(g) = SignedGraph::new(n, edges) {
            return g;
        }
    }
}

/// Every simple cycle as a list of edge weights, by DFS from each start node
/// through higher-numbered nodes only. Each cycle appears once per direction.
pub fn simple_cycles(g: &SignedGraph) -> Vec<Vec<f64>> {
    let n = g.n();
    let w = g.adjacency();
    let mut out = Vec::new();
    fn dfs(
        w: &DenseMatrix,
        start: usize,
        u: usize,
        path: &mut Vec<usize>,
        on: &mut Vec<bool>,
        out: &mut Vec<Vec<f64>>,
    ) {
        let n = w.rows();
        for v in 0..n {
            if w[(u, v)] == 0.0 {
                continue;
            }
            if v == start && path.len() >= 3 {
                let mut ws: Vec<f64> = path.windows(2).map(|p| w[(p[0], p[1])]).collect();
                ws.push(w[(u, start)]);
                out.push(ws);
            } else if v > start && !on[v] {
                on[v] = true;
                path.push(v);
                dfs(w, start, v, path, on, out);
                path.pop();
                on[v] = false;
            }
        }
    }
    for s in 0..n {
        let mut on = vec![false; n];
        on[s] = true;
        dfs(&w, s, s, &mut vec![s], &mut on, &mut out);
    }
    out
}

/// (balanced, antibalanced) from cycle sign counts.
pub fn cycle_oracle(g: &SignedGraph) -> (bool, bool) {
    let cycles = simple_cycles(g);
    let balanced = cycles.iter().all(|c| c.iter().filter(|w| **w < 0.0).count() % 2 == 0);
    let antibalanced = cycles.iter().all(|c| c.iter().filter(|w| **w > 0.0).count() % 2 == 0);
    (balanced, antibalanced)
}

pub fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Eigenvalues of a symmetric matrix via nalgebra, descending.
pub fn na_symmetric_eigenvalues(m: &DenseMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = to_na(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Eigenvalues of a general real matrix via nalgebra's Schur form, as
/// (real, imaginary) pairs sorted by real part descending.
pub fn na_general_eigenvalues(m: &DenseMatrix) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = to_na(m).complex_eigenvalues().iter().map(|c| (c.re, c.im)).collect();
    v.sort_by(|a, b| b.0.total_cmp(&a.0));
    v
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Row-vector iteration `x ← xᵀM` with plain nested loops.
pub fn naive_left_iterate(m: &DenseMatrix, x0: &[f64], steps: usize) -> Vec<Vec<f64>> {
    let n = x0.len();
    let mut out = vec![x0.to_vec()];
    for _ in 0..steps {
        let x = out.last().unwrap();
        let mut y = vec![0.0; n];
        for j in 0..n {
            for i in 0..n {
                y[j] += x[i] * m[(i, j)];
            }
        }
        out.push(y);
    }
    out
}

/// Minimum number of edges whose sign must flip for balance (`orient = 1`)
/// or antibalance (`orient = -1`), by exhaustive search over edge subsets.
pub fn min_flips_by_edge_subsets(g: &SignedGraph, orient: f64) -> usize {
    let e = g.edge_count();
    assert!(e <= 16, "edge-subset oracle is exponential in |E|");
    let mut best = usize::MAX;
    for mask in 0u32..(1 << e) {
        let k = mask.count_ones() as usize;
        if k >= best {
            continue;
        }
        let flipped: Vec<Edge> = g
            .edges()
            .iter()
            .enumerate()
            .map(|(idx, x)| Edge::new(x.i, x.j, if mask >> idx & 1 == 1 { -x.w } else { x.w }))
            .collect();
        let h = SignedGraph::new(g.n(), flipped).unwrap();
        let (b, a) = cycle_oracle(&h);
        if (orient > 0.0 && b) || (orient < 0.0 && a) {
            best = k;
        }
    }
    best
}
