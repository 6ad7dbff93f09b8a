//! Edge-list text format and trajectory CSV.
//!
//! ```text
//! # comment
//! n 4
//! 0 1 0.1
//! 1 2 -0.1
//! ```
//!
//! The `n <N>` line is optional and must precede all edges. Without it,
//! endpoints that all parse as non-negative integers are used as ids directly
//! (`n` = max id + 1); otherwise every endpoint is a label and ids are
//! assigned in order of first appearance.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::dynamics::Trajectory;
use crate::graph::{Edge, GraphError, SignedGraph};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn parse_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse { line, message: message.into() }
}

/// Graph plus the original label of each node id.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: SignedGraph,
    pub labels: Vec<String>,
}

pub fn parse_edge_list(text: &str) -> Result<LoadedGraph, IoError> {
    let mut declared_n = None;
    let mut raw: Vec<(usize, &str, &str, f64)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "n" {
            if declared_n.is_some() || !raw.is_empty() {
                return Err(parse_err(lineno, "node count line must come first and only once"));
            }
            if fields.len() != 2 {
                return Err(parse_err(lineno, "expected `n <N>`"));
            }
            let n = fields[1]
                .parse::<usize>()
                .map_err(|_| parse_err(lineno, format!("invalid node count `{}`", fields[1])))?;
            declared_n = Some(n);
            continue;
        }
        if fields.len() != 3 {
            return Err(parse_err(lineno, format!("expected `i j w`, found {} field(s)", fields.len())));
        }
        let w = fields[2].parse::<f64>().map_err(|_| parse_err(lineno, format!("invalid weight `{}`", fields[2])))?;
        raw.push((lineno, fields[0], fields[1], w));
    }

    let numeric = raw.iter().all(|(_, a, b, _)| a.parse::<usize>().is_ok() && b.parse::<usize>().is_ok());
    let (n, edges, labels) = if numeric {
        let ids: Vec<(usize, usize, usize, f64)> =
            raw.iter().map(|&(l, a, b, w)| (l, a.parse().unwrap(), b.parse().unwrap(), w)).collect();
        let inferred = ids.iter().map(|&(_, i, j, _)| i.max(j) + 1).max().unwrap_or(0);
        let n = declared_n.unwrap_or(inferred);
        if let Some(&(l, i, j, _)) = ids.iter().find(|&&(_, i, j, _)| i >= n || j >= n) {
            return Err(parse_err(l, format!("node id {} out of range for n = {n}", i.max(j))));
        }
        let edges: Vec<Edge> = ids.iter().map(|&(_, i, j, w)| Edge::new(i, j, w)).collect();
        (n, edges, (0..n).map(|i| i.to_string()).collect())
    } else {
        if let Some(n) = declared_n {
            return Err(parse_err(raw[0].0, format!("labels are not allowed together with `n {n}`")));
        }
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut labels: Vec<String> = Vec::new();
        let mut edges = Vec::with_capacity(raw.len());
        for &(_, a, b, w) in &raw {
            let mut ids = [0; 2];
            for (slot, s) in ids.iter_mut().zip([a, b]) {
                *slot = *index.entry(s).or_insert_with(|| {
                    labels.push(s.to_string());
                    labels.len() - 1
                });
            }
            edges.push(Edge::new(ids[0], ids[1], w));
        }
        (labels.len(), edges, labels)
    };
    // report the offending line for per-edge validation failures
    let graph = SignedGraph::new(n, edges.clone()).map_err(|e| match e {
        GraphError::SelfLoop(_) | GraphError::ZeroWeight { .. } | GraphError::DuplicateEdge { .. } => {
            let bad = match &e {
                GraphError::SelfLoop(v) => edges.iter().position(|x| x.i == *v && x.j == *v),
                GraphError::ZeroWeight { i, j, .. } => edges.iter().position(|x| x.i == *i && x.j == *j),
                GraphError::DuplicateEdge { i, j } => edges.iter().rposition(|x| x.i == *i && x.j == *j),
                _ => None,
            };
            match bad {
                Some(k) => parse_err(raw[k].0, e.to_string()),
                None => IoError::Graph(e),
            }
        }
        other => IoError::Graph(other),
    })?;
    Ok(LoadedGraph { graph, labels })
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<LoadedGraph, IoError> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|source| IoError::Io { path: path.display().to_string(), source })?;
    parse_edge_list(&text)
}

/// Serialises with an `n` line and one `i j w` line per edge; each comment
/// line gets a `# ` prefix. Weights use the shortest round-trip decimal form.
pub fn write_edge_list(g: &SignedGraph, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "n {}", g.n());
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", e.i, e.j, e.w);
    }
    out
}

/// `t,node,value` rows in time-major order.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,node,value\n");
    for (t, x) in traj.states.iter().enumerate() {
        for (j, v) in x.iter().enumerate() {
            let _ = writeln!(out, "{t},{j},{v}");
        }
    }
    out
}

/// Parses the output of [`trajectory_csv`] back into states.
pub fn parse_trajectory_csv(text: &str) -> Result<Vec<Vec<f64>>, IoError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "t,node,value")) => {}
        _ => return Err(parse_err(1, "expected header `t,node,value`")),
    }
    let mut states: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in lines {
        let f: Vec<&str> = line.split(',').collect();
        let bad = || parse_err(idx + 1, format!("malformed row `{line}`"));
        if f.len() != 3 {
            return Err(bad());
        }
        let t: usize = f[0].parse().map_err(|_| bad())?;
        let j: usize = f[1].parse().map_err(|_| bad())?;
        let v: f64 = f[2].parse().map_err(|_| bad())?;
        if t == states.len() {
            states.push(Vec::new());
        }
        if t + 1 != states.len() || j != states[t].len() {
            return Err(bad());
        }
        states[t].push(v);
    }
    Ok(states)
}
