//! Brute-force reference implementations shared by the placement tests and the
//! acceptance suite. Nothing here calls into the library's own metrics.
#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::DMatrix;
use spanfl_core::Graph;

pub const UNREACHABLE: usize = usize::MAX;

/// Unit-norm non-negative Perron vector of the adjacency matrix from a dense
/// eigendecomposition: the eigenvalue with largest real part, then the null
/// space of `E - lambda I` via SVD.
pub fn dense_perron(g: &Graph) -> (f64, Vec<f64>) {
    let n = g.n();
    let e = DMatrix::from_fn(n, n, |i, j| if g.has_edge(i, j) { 1.0 } else { 0.0 });
    let lambda = e
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let shifted = &e - DMatrix::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap();
    let mut v: Vec<f64> = v_t.row(k).iter().copied().collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    v.iter_mut().for_each(|x| *x *= sign / norm);
    (lambda, v)
}

/// All-pairs directed hop distances by Floyd-Warshall.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut d = vec![vec![UNREACHABLE; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        for j in 0..n {
            if g.has_edge(i, j) {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] != UNREACHABLE && d[k][j] != UNREACHABLE && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// The `s` hop-nearest nodes to `root`, keeping every node tied with the
/// `s`-th one. Sorted ascending.
pub fn nearest(dist: &[Vec<usize>], root: usize, s: usize) -> Vec<usize> {
    let mut by_dist: Vec<(usize, usize)> = dist[root]
        .iter()
        .enumerate()
        .filter(|(_, &d)| d != UNREACHABLE)
        .map(|(v, &d)| (d, v))
        .collect();
    by_dist.sort_unstable();
    let cutoff = by_dist[s.min(by_dist.len()) - 1].0;
    let mut out: Vec<usize> = by_dist.into_iter().filter(|&(d, _)| d <= cutoff).map(|(_, v)| v).collect();
    out.sort_unstable();
    out
}

pub fn intersection(a: &[usize], b: &[usize]) -> usize {
    a.iter().filter(|x| b.contains(x)).count()
}

/// `|R[x] ∩ (R[a1] ∪ R[a2] ∪ ...)|` for a candidate `x` against a set.
pub fn overlap_with(regions: &[Vec<usize>], set: &[usize], x: usize) -> usize {
    regions[x]
        .iter()
        .filter(|w| set.iter().any(|&a| regions[a].contains(w)))
        .count()
}

/// Greedy overlaps summed in selection order.
pub fn greedy_objective(regions: &[Vec<usize>], members: &[usize]) -> usize {
    (1..members.len()).map(|k| overlap_with(regions, &members[..k], members[k])).sum()
}
