use std::collections::VecDeque;

use super::{Graph, GraphError};

/// Hop distances from `src` along out-edges; `None` when unreachable.
pub fn hop_distances(g: &Graph, src: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap_or(0);
        for &v in g.out_neighbors(u) {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

fn reaches_all(g: &Graph, forward: bool) -> bool {
    let mut seen = vec![false; g.n()];
    seen[0] = true;
    let mut stack = vec![0];
    let mut count = 1;
    while let Some(u) = stack.pop() {
        let next = if forward {
            g.out_neighbors(u)
        } else {
            g.in_neighbors(u)
        };
        for &v in next {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == g.n()
}

/// Node 0 reaches everyone and everyone reaches node 0.
pub fn is_strongly_connected(g: &Graph) -> bool {
    g.n() <= 1 || (reaches_all(g, true) && reaches_all(g, false))
}

/// L2-normalized, non-negative Perron vector of the adjacency matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector {
    pub values: Vec<f64>,
    /// Rayleigh quotient `v^T E v` at the returned vector.
    pub eigenvalue: f64,
    pub iterations: usize,
}

impl CentralityVector {
    /// Indices sorted by decreasing centrality, ties by ascending index.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.values.len()).collect();
        idx.sort_by(|&a, &b| self.values[b].total_cmp(&self.values[a]).then(a.cmp(&b)));
        idx
    }
}

/// Right Perron eigenvector of `E` (`E v = lambda_max v`, `E[i][j] = 1` for an
/// edge `i -> j`), so a node scores the sum of its out-neighbors' scores.
///
/// Iterates `(E + I) v` from the uniform vector. The shift keeps the same
/// eigenvectors but makes the Perron root strictly dominant, which plain
/// iteration lacks on periodic graphs such as the bidirectional star.
pub fn eigenvector_centrality(
    g: &Graph,
    tol: f64,
    max_iter: usize,
) -> Result<CentralityVector, GraphError> {
    let n = g.n();
    if !is_strongly_connected(g) {
        return Err(GraphError::NotStronglyConnected);
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iter in 1..=max_iter {
        for i in 0..n {
            next[i] = v[i] + g.out_neighbors(i).iter().map(|&j| v[j]).sum::<f64>();
        }
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        next.iter_mut().for_each(|x| *x /= norm);
        residual = v
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        std::mem::swap(&mut v, &mut next);
        if residual < tol {
            let eigenvalue = (0..n)
                .map(|i| v[i] * g.out_neighbors(i).iter().map(|&j| v[j]).sum::<f64>())
                .sum();
            return Ok(CentralityVector {
                values: v,
                eigenvalue,
                iterations: iter,
            });
        }
    }
    Err(GraphError::NonConvergence {
        iterations: max_iter,
        residual,
    })
}

/// In-degree plus out-degree.
pub fn degree_centrality(g: &Graph) -> Vec<usize> {
    (0..g.n())
        .map(|i| g.in_neighbors(i).len() + g.out_neighbors(i).len())
        .collect()
}

/// Local clustering coefficient on the undirected projection.
pub fn clustering_coefficients(g: &Graph) -> Vec<f64> {
    let nbrs = g.undirected_neighbors();
    nbrs.iter()
        .map(|ns| {
            let k = ns.len();
            if k < 2 {
                return 0.0;
            }
            let mut triangles = 0usize;
            for (a, &u) in ns.iter().enumerate() {
                for &w in &ns[a + 1..] {
                    if nbrs[u].binary_search(&w).is_ok() {
                        triangles += 1;
                    }
                }
            }
            triangles as f64 / (k * (k - 1) / 2) as f64
        })
        .collect()
}

/// `(var(deg) - d_min) / (d_max - d_min)` with `deg = in + out` and the
/// population variance. Can be negative. Zero when all degrees agree.
pub fn degree_variance_normalized(g: &Graph) -> f64 {
    let deg: Vec<f64> = degree_centrality(g).into_iter().map(|d| d as f64).collect();
    if deg.is_empty() {
        return 0.0;
    }
    let d_min = deg.iter().copied().fold(f64::INFINITY, f64::min);
    let d_max = deg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if d_max == d_min {
        return 0.0;
    }
    let mean = deg.iter().sum::<f64>() / deg.len() as f64;
    let var = deg.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / deg.len() as f64;
    (var - d_min) / (d_max - d_min)
}

/// Breadth-first influence region of `root`, grown level by level along
/// out-edges until it holds at least `s_cluster` nodes (or nothing new is
/// reachable). The level that crosses the threshold is kept whole.
/// Returned sorted ascending.
pub fn bfs_cluster(g: &Graph, root: usize, s_cluster: usize) -> Vec<usize> {
    let mut seen = vec![false; g.n()];
    seen[root] = true;
    let mut cluster = vec![root];
    let mut frontier = vec![root];
    while cluster.len() < s_cluster && !frontier.is_empty() {
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in g.out_neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    next.push(v);
                }
            }
        }
        next.sort_unstable();
        cluster.extend_from_slice(&next);
        frontier = next;
    }
    cluster.sort_unstable();
    cluster
}

/// `sum_{i<j in nodes} d(i, j)` with directed hop distance `i -> j`.
pub fn total_pairwise_distance(g: &Graph, nodes: &[usize]) -> Result<u64, GraphError> {
    let mut sorted = nodes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut total = 0u64;
    for (a, &i) in sorted.iter().enumerate() {
        if a + 1 == sorted.len() {
            break;
        }
        let dist = hop_distances(g, i);
        for &j in &sorted[a + 1..] {
            total += dist[j].ok_or(GraphError::Unreachable { from: i, to: j })? as u64;
        }
    }
    Ok(total)
}
