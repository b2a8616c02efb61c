//! Directed graphs over `0..n` and the topology machinery built on them.

mod failures;
mod generate;
mod io;
mod metrics;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use failures::{apply_failures, FailureOutcome};
pub use generate::{
    gen_directed_geometric, gen_erdos_renyi, gen_preferential_attachment, generate, GenOptions,
    DEFAULT_MAX_RETRIES,
};
pub use io::{parse_edge_list, write_edge_list};
pub use metrics::{
    bfs_cluster, clustering_coefficients, degree_centrality, degree_variance_normalized,
    eigenvector_centrality, hop_distances, is_strongly_connected, total_pairwise_distance,
    CentralityVector,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("edge ({0}, {1}) is a self-loop or has an endpoint outside 0..{2}")]
    InvalidEdge(usize, usize, usize),
    #[error("no strongly connected sample after {0} attempts")]
    GenerationFailed(usize),
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("power iteration did not converge in {iterations} iterations (last change {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("node {to} is unreachable from node {from}")]
    Unreachable { from: usize, to: usize },
    #[error("every node failed")]
    EmptyGraph,
    #[error("edge list line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Random graph distributions used in the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphFamily {
    /// Each ordered pair is an edge with probability `p`.
    ErdosRenyi { p: f64 },
    /// Uniform positions in the unit square, linked when closer than `r`.
    DirectedGeometric { r: f64 },
    /// Barabási–Albert growth with `m0` attachments per arrival.
    PreferentialAttachment { m0: usize },
}

impl GraphFamily {
    /// Short identifier used in run ids and CSV output (`er`, `dg`, `pa`).
    pub fn short_name(&self) -> &'static str {
        match self {
            GraphFamily::ErdosRenyi { .. } => "er",
            GraphFamily::DirectedGeometric { .. } => "dg",
            GraphFamily::PreferentialAttachment { .. } => "pa",
        }
    }

    /// The family's single parameter as a float.
    pub fn param(&self) -> f64 {
        match *self {
            GraphFamily::ErdosRenyi { p } => p,
            GraphFamily::DirectedGeometric { r } => r,
            GraphFamily::PreferentialAttachment { m0 } => m0 as f64,
        }
    }

    pub fn param_name(&self) -> &'static str {
        match self {
            GraphFamily::ErdosRenyi { .. } => "p",
            GraphFamily::DirectedGeometric { .. } => "r",
            GraphFamily::PreferentialAttachment { .. } => "m0",
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), GraphError> {
        let bad = |m: String| Err(GraphError::InvalidParameter(m));
        match *self {
            GraphFamily::ErdosRenyi { p } if !(p > 0.0 && p <= 1.0) => {
                bad(format!("edge probability p = {p} outside (0, 1]"))
            }
            GraphFamily::DirectedGeometric { r } if !(r > 0.0 && r.is_finite()) => {
                bad(format!("radius r = {r} must be positive"))
            }
            GraphFamily::PreferentialAttachment { m0 } if m0 == 0 || m0 >= n => {
                bad(format!("m0 = {m0} outside 1..{n}"))
            }
            _ if n < 2 => bad(format!("n = {n} is below 2")),
            _ => Ok(()),
        }
    }
}

/// A directed graph without self-loops. Adjacency lists are kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    positions: Option<Vec<[f64; 2]>>,
}

impl Graph {
    /// Builds a graph from ordered pairs. Duplicate pairs collapse.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (i, j) in edges {
            if i == j || i >= n || j >= n {
                return Err(GraphError::InvalidEdge(i, j, n));
            }
            out[i].push(j);
            inc[j].push(i);
        }
        for list in out.iter_mut().chain(inc.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self {
            out,
            inc,
            positions: None,
        })
    }

    /// Symmetric digraph: each undirected pair becomes both directed edges.
    pub fn from_undirected<I>(n: usize, pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges(n, pairs.into_iter().flat_map(|(a, b)| [(a, b), (b, a)]))
    }

    pub fn with_positions(mut self, positions: Vec<[f64; 2]>) -> Result<Self, GraphError> {
        if positions.len() != self.n() {
            return Err(GraphError::InvalidParameter(format!(
                "{} positions for {} nodes",
                positions.len(),
                self.n()
            )));
        }
        self.positions = Some(positions);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        &self.inc[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.out[i].binary_search(&j).is_ok()
    }

    pub fn positions(&self) -> Option<&[[f64; 2]]> {
        self.positions.as_deref()
    }

    /// All edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(i, js)| js.iter().map(move |&j| (i, j)))
    }

    /// True when every edge has its reverse.
    pub fn is_symmetric(&self) -> bool {
        self.edges().all(|(i, j)| self.has_edge(j, i))
    }

    /// Sorted neighbor lists of the undirected projection.
    pub fn undirected_neighbors(&self) -> Vec<Vec<usize>> {
        (0..self.n())
            .map(|i| {
                let mut v: Vec<usize> = self.out[i].iter().chain(&self.inc[i]).copied().collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect()
    }

    /// Dense 0/1 adjacency, row `i` holding the out-edges of `i`.
    pub fn adjacency_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut m = vec![vec![0.0; n]; n];
        for (i, j) in self.edges() {
            m[i][j] = 1.0;
        }
        m
    }

    pub fn complete(n: usize) -> Self {
        Self::from_edges(
            n,
            (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))),
        )
        .expect("complete graph edges are valid")
    }

    /// Directed cycle `0 -> 1 -> ... -> n-1 -> 0`.
    pub fn directed_cycle(n: usize) -> Self {
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle edges are valid")
    }

    /// Bidirectional star with hub 0.
    pub fn star(leaves: usize) -> Self {
        Self::from_undirected(leaves + 1, (1..=leaves).map(|l| (0, l)))
            .expect("star edges are valid")
    }
}
