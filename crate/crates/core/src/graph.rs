//! Undirected weighted signed graphs and the matrices built from them.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::DenseMatrix;

/// Weights with magnitude below this are treated as absent and rejected.
pub const MIN_WEIGHT: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    NoNodes,
    #[error("edge ({i}, {j}): node id out of range for n = {n}")]
    IdOutOfRange { i: usize, j: usize, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({i}, {j})")]
    DuplicateEdge { i: usize, j: usize },
    #[error("edge ({i}, {j}) has zero or non-finite weight {w}")]
    ZeroWeight { i: usize, j: usize, w: f64 },
    #[error("graph is disconnected: node {0} is unreachable from node 0")]
    Disconnected(usize),
}

/// One undirected edge, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

impl Edge {
    pub fn new(i: usize, j: usize, w: f64) -> Self {
        if i <= j {
            Edge { i, j, w }
        } else {
            Edge { i: j, j: i, w }
        }
    }

    pub fn sign(&self) -> f64 {
        self.w.signum()
    }
}

impl From<(usize, usize, f64)> for Edge {
    fn from((i, j, w): (usize, usize, f64)) -> Self {
        Edge::new(i, j, w)
    }
}

/// Node degrees `d_i = Σ_j |W_ij|` and their sum `2m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeVector {
    pub d: Vec<f64>,
    pub total: f64,
}

impl DegreeVector {
    /// Half the total degree.
    pub fn m(&self) -> f64 {
        self.total / 2.0
    }
}

/// Connected, undirected, signed and weighted graph without self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, f64)>>,
}

fn validate_edges(n: usize, edges: &[Edge]) -> Result<(), GraphError> {
    if n == 0 {
        return Err(GraphError::NoNodes);
    }
    let mut seen = HashSet::with_capacity(edges.len());
    for e in edges {
        if e.i >= n || e.j >= n {
            return Err(GraphError::IdOutOfRange { i: e.i, j: e.j, n });
        }
        if e.i == e.j {
            return Err(GraphError::SelfLoop(e.i));
        }
        if !e.w.is_finite() || e.w.abs() < MIN_WEIGHT {
            return Err(GraphError::ZeroWeight { i: e.i, j: e.j, w: e.w });
        }
        if !seen.insert((e.i, e.j)) {
            return Err(GraphError::DuplicateEdge { i: e.i, j: e.j });
        }
    }
    Ok(())
}

fn adjacency_lists(n: usize, edges: &[Edge]) -> Vec<Vec<(usize, f64)>> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.i].push((e.j, e.w));
        adj[e.j].push((e.i, e.w));
    }
    adj
}

/// BFS labels; `label[v]` is the component index of `v`.
fn component_labels(adj: &[Vec<(usize, f64)>]) -> (Vec<usize>, usize) {
    let n = adj.len();
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    for root in 0..n {
        if label[root] != usize::MAX {
            continue;
        }
        label[root] = count;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &adj[u] {
                if label[v] == usize::MAX {
                    label[v] = count;
                    queue.push_back(v);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

impl SignedGraph {
    /// Validates and builds a graph. Edge endpoints are reordered so `i < j`.
    pub fn new<E: Into<Edge>>(n: usize, edges: impl IntoIterator<Item = E>) -> Result<Self, GraphError> {
        let edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| {
                let e: Edge = e.into();
                Edge::new(e.i, e.j, e.w)
            })
            .collect();
        validate_edges(n, &edges)?;
        let adj = adjacency_lists(n, &edges);
        let (label, _) = component_labels(&adj);
        if let Some(v) = label.iter().position(|&c| c != 0) {
            return Err(GraphError::Disconnected(v));
        }
        Ok(SignedGraph { n, edges, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbours of `i` with the connecting weight.
    pub fn neighbours(&self, i: usize) -> &[(usize, f64)] {
        &self.adj[i]
    }

    /// `W_ij`, zero when there is no edge.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adj[i].iter().find(|&&(v, _)| v == j).map_or(0.0, |&(_, w)| w)
    }

    /// Same topology with every weight passed through `f`. `f` must not
    /// produce zero weights.
    pub fn map_weights(&self, f: impl Fn(&Edge) -> f64) -> SignedGraph {
        let edges: Vec<Edge> = self.edges.iter().map(|e| Edge { w: f(e), ..*e }).collect();
        let adj = adjacency_lists(self.n, &edges);
        SignedGraph { n: self.n, edges, adj }
    }

    pub fn degree_vector(&self) -> DegreeVector {
        let d: Vec<f64> = self.adj.iter().map(|nb| nb.iter().map(|&(_, w)| w.abs()).sum()).collect();
        let total = d.iter().sum();
        DegreeVector { d, total }
    }

    /// The unsigned counterpart `W̄` with `W̄_ij = |W_ij|`.
    pub fn unsigned_counterpart(&self) -> SignedGraph {
        self.map_weights(|e| e.w.abs())
    }

    /// `w -> -w` on every edge.
    pub fn negate(&self) -> SignedGraph {
        self.map_weights(|e| -e.w)
    }

    pub fn is_all_positive(&self) -> bool {
        self.edges.iter().all(|e| e.w > 0.0)
    }

    /// Two-colouring of the underlying unsigned graph, colour of node 0 is +1.
    pub fn two_colouring(&self) -> Option<Vec<i8>> {
        let mut colour = vec![0i8; self.n];
        colour[0] = 1;
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adj[u] {
                if colour[v] == 0 {
                    colour[v] = -colour[u];
                    queue.push_back(v);
                } else if colour[v] == colour[u] {
                    return None;
                }
            }
        }
        Some(colour)
    }

    pub fn is_bipartite(&self) -> bool {
        self.two_colouring().is_some()
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.n
    }

    /// The weighted adjacency matrix `W`.
    pub fn adjacency(&self) -> DenseMatrix {
        self.dense_from(|w| w)
    }

    /// `W⁺`, the positive part.
    pub fn positive_part(&self) -> DenseMatrix {
        self.dense_from(|w| w.max(0.0))
    }

    /// `W⁻`, the magnitude of the negative part, so `W = W⁺ - W⁻`.
    pub fn negative_part(&self) -> DenseMatrix {
        self.dense_from(|w| (-w).max(0.0))
    }

    /// `A_ij = sign(W_ij)`.
    pub fn sign_adjacency(&self) -> DenseMatrix {
        self.dense_from(f64::signum)
    }

    fn dense_from(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            let v = f(e.w);
            m[(e.i, e.j)] = v;
            m[(e.j, e.i)] = v;
        }
        m
    }

    /// `L = D - W`.
    pub fn signed_laplacian(&self) -> DenseMatrix {
        let d = self.degree_vector().d;
        let mut l = self.adjacency().scale(-1.0);
        for (i, di) in d.into_iter().enumerate() {
            l[(i, i)] = di;
        }
        l
    }

    /// `P = D⁻¹W`. Rows of an isolated node (only possible for `n = 1`) are zero.
    pub fn transition_matrix(&self) -> DenseMatrix {
        let d = self.degree_vector().d;
        let mut p = self.adjacency();
        for i in 0..self.n {
            let inv = if d[i] > 0.0 { 1.0 / d[i] } else { 0.0 };
            for j in 0..self.n {
                p[(i, j)] *= inv;
            }
        }
        p
    }

    /// `L_rw = I - D⁻¹W`.
    pub fn random_walk_laplacian(&self) -> DenseMatrix {
        DenseMatrix::identity(self.n).sub(&self.transition_matrix())
    }

    /// `P_sym = D^{-1/2} W D^{-1/2}`, similar to `P`.
    pub fn symmetrized_transition(&self) -> DenseMatrix {
        let d = self.degree_vector().d;
        let r: Vec<f64> = d.iter().map(|&x| if x > 0.0 { 1.0 / x.sqrt() } else { 0.0 }).collect();
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            let v = r[e.i] * e.w * r[e.j];
            m[(e.i, e.j)] = v;
            m[(e.j, e.i)] = v;
        }
        m
    }

    /// `W⁽²⁾ = [W⁺ W⁻; W⁻ W⁺]`, size `2n × 2n`.
    pub fn doubled_adjacency(&self) -> DenseMatrix {
        let n = self.n;
        let mut m = DenseMatrix::zeros(2 * n, 2 * n);
        for e in &self.edges {
            let (i, j, a) = (e.i, e.j, e.w.abs());
            let (di, dj) = if e.w > 0.0 { (0, 0) } else { (n, n) };
            // positive edges stay within a species, negative edges swap species
            m[(i, j + dj)] = a;
            m[(j, i + di)] = a;
            m[(i + n, (j + dj + n) % (2 * n))] = a;
            m[(j + n, (i + di + n) % (2 * n))] = a;
        }
        m
    }

    /// `P⁽²⁾ = D⁽²⁾⁻¹ W⁽²⁾` with `D⁽²⁾ = diag(d, d)`.
    pub fn doubled_transition(&self) -> DenseMatrix {
        let d = self.degree_vector().d;
        let n = self.n;
        let mut m = self.doubled_adjacency();
        for r in 0..2 * n {
            let di = d[r % n];
            let inv = if di > 0.0 { 1.0 / di } else { 0.0 };
            for c in 0..2 * n {
                m[(r, c)] *= inv;
            }
        }
        m
    }
}

/// A connected piece of a possibly disconnected edge list.
#[derive(Debug, Clone)]
pub struct Component {
    pub graph: SignedGraph,
    /// `nodes[k]` is the original id of local node `k`.
    pub nodes: Vec<usize>,
}

/// Splits a validated edge list into connected components, ordered by their
/// smallest original node id.
pub fn components<E: Into<Edge>>(n: usize, edges: impl IntoIterator<Item = E>) -> Result<Vec<Component>, GraphError> {
    let edges: Vec<Edge> = edges
        .into_iter()
        .map(|e| {
            let e: Edge = e.into();
            Edge::new(e.i, e.j, e.w)
        })
        .collect();
    validate_edges(n, &edges)?;
    let adj = adjacency_lists(n, &edges);
    let (label, count) = component_labels(&adj);
    let mut nodes = vec![Vec::new(); count];
    let mut local = vec![0; n];
    for v in 0..n {
        local[v] = nodes[label[v]].len();
        nodes[label[v]].push(v);
    }
    let mut parts: Vec<Vec<Edge>> = vec![Vec::new(); count];
    for e in &edges {
        parts[label[e.i]].push(Edge::new(local[e.i], local[e.j], e.w));
    }
    nodes
        .into_iter()
        .zip(parts)
        .map(|(nodes, es)| Ok(Component { graph: SignedGraph::new(nodes.len(), es)?, nodes }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(w: [f64; 3]) -> SignedGraph {
        SignedGraph::new(3, [(0, 1, w[0]), (1, 2, w[1]), (0, 2, w[2])]).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert!(triangle([1.0, 1.0, 1.0]).n() == 3);
        assert!(SignedGraph::new(2, [(0, 1, -1.0)]).is_ok());
        assert_eq!(SignedGraph::new(3, [(0, 1, 1.0)]), Err(GraphError::Disconnected(2)));
        assert_eq!(SignedGraph::new(2, [(0, 0, 1.0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(SignedGraph::new(2, [(0, 1, 1.0), (1, 0, 2.0)]), Err(GraphError::DuplicateEdge { i: 0, j: 1 }));
        assert!(matches!(SignedGraph::new(2, [(0, 1, 1e-16)]), Err(GraphError::ZeroWeight { .. })));
        assert!(matches!(SignedGraph::new(2, [(0, 1, f64::NAN)]), Err(GraphError::ZeroWeight { .. })));
        assert_eq!(SignedGraph::new(2, [(0, 2, 1.0)]), Err(GraphError::IdOutOfRange { i: 0, j: 2, n: 2 }));
        assert_eq!(SignedGraph::new(0, Vec::<Edge>::new()), Err(GraphError::NoNodes));
        assert!(SignedGraph::new(1, Vec::<Edge>::new()).is_ok());
    }

    #[test]
    fn degrees() {
        let t = triangle([1.0, 1.0, 1.0]).degree_vector();
        assert_eq!(t.d, vec![2.0, 2.0, 2.0]);
        assert_eq!(t.total, 6.0);
        let dyad = SignedGraph::new(2, [(0, 1, -1.0)]).unwrap().degree_vector();
        assert_eq!(dyad.d, vec![1.0, 1.0]);
        let c4 = SignedGraph::new(4, [(0, 1, -0.1), (1, 2, 0.1), (2, 3, -0.1), (3, 0, 0.1)]).unwrap();
        for d in c4.degree_vector().d {
            assert!((d - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn unsigned_and_negated() {
        let g = triangle([-1.0, -1.0, -1.0]);
        assert!(g.unsigned_counterpart().is_all_positive());
        assert_eq!(g.negate().negate(), g);
        let dyad = SignedGraph::new(2, [(0, 1, -0.5)]).unwrap();
        assert_eq!(dyad.unsigned_counterpart().weight(0, 1), 0.5);
        let s = dyad.sign_adjacency();
        assert_eq!((s[(0, 1)], s[(1, 0)], s[(0, 0)]), (-1.0, -1.0, 0.0));
    }

    #[test]
    fn laplacian_row_sums() {
        let pos = triangle([1.0, 1.0, 1.0]).signed_laplacian();
        let neg = triangle([-1.0, -1.0, -1.0]).signed_laplacian();
        for i in 0..3 {
            assert_eq!(pos.row(i).iter().sum::<f64>(), 0.0);
            assert_eq!(neg.row(i).iter().sum::<f64>(), 4.0);
        }
    }

    #[test]
    fn transition_rows() {
        let p = SignedGraph::new(2, [(0, 1, -1.0)]).unwrap().transition_matrix();
        assert_eq!(p, DenseMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]));
        let p = triangle([1.0, 1.0, 1.0]).transition_matrix();
        assert_eq!(p[(0, 1)], 0.5);
    }

    #[test]
    fn doubled_blocks() {
        let g = triangle([1.0, -2.0, 3.0]);
        let w2 = g.doubled_adjacency();
        let n = 3;
        assert_eq!(w2.block(0, 0, n, n), g.positive_part());
        assert_eq!(w2.block(0, n, n, n), g.negative_part());
        assert_eq!(w2.block(n, 0, n, n), g.negative_part());
        assert_eq!(w2.block(n, n, n, n), g.positive_part());
    }

    #[test]
    fn bipartiteness() {
        assert!(!triangle([1.0, 1.0, 1.0]).is_bipartite());
        let c4 = SignedGraph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap();
        assert_eq!(c4.two_colouring(), Some(vec![1, -1, 1, -1]));
    }

    #[test]
    fn component_splitter() {
        let parts = components(5, [(0, 3, 1.0), (1, 2, -1.0), (2, 4, 2.0)]).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].nodes, vec![0, 3]);
        assert_eq!(parts[1].nodes, vec![1, 2, 4]);
        assert_eq!(parts[1].graph.weight(0, 1), -1.0);
        assert_eq!(parts[1].graph.weight(1, 2), 2.0);
    }
}
