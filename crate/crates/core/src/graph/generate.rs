use rand::Rng;

use super::{is_strongly_connected, Graph, GraphError, GraphFamily};

pub const DEFAULT_MAX_RETRIES: usize = 100_000;

/// Rejection-sampling controls shared by all generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenOptions {
    pub require_strong_connectivity: bool,
    pub max_retries: usize,
}

impl Default for GenOptions {
    fn default() -> Self {
        Self {
            require_strong_connectivity: true,
            max_retries: DEFAULT_MAX_RETRIES,
        }
    }
}

/// Draws a graph from `family`, resampling until strongly connected when
/// `opts.require_strong_connectivity` is set.
pub fn generate<R: Rng + ?Sized>(
    family: GraphFamily,
    n: usize,
    opts: GenOptions,
    rng: &mut R,
) -> Result<Graph, GraphError> {
    family.validate(n)?;
    let attempts = opts.max_retries.max(1);
    for _ in 0..attempts {
        let g = match family {
            GraphFamily::ErdosRenyi { p } => sample_erdos_renyi(n, p, rng),
            GraphFamily::DirectedGeometric { r } => sample_geometric(n, r, rng),
            GraphFamily::PreferentialAttachment { m0 } => sample_barabasi_albert(n, m0, rng),
        };
        if !opts.require_strong_connectivity || is_strongly_connected(&g) {
            return Ok(g);
        }
    }
    Err(GraphError::GenerationFailed(attempts))
}

pub fn gen_erdos_renyi<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    rng: &mut R,
) -> Result<Graph, GraphError> {
    generate(GraphFamily::ErdosRenyi { p }, n, GenOptions::default(), rng)
}

pub fn gen_directed_geometric<R: Rng + ?Sized>(
    n: usize,
    r: f64,
    rng: &mut R,
) -> Result<Graph, GraphError> {
    generate(GraphFamily::DirectedGeometric { r }, n, GenOptions::default(), rng)
}

pub fn gen_preferential_attachment<R: Rng + ?Sized>(
    n: usize,
    m0: usize,
    rng: &mut R,
) -> Result<Graph, GraphError> {
    generate(
        GraphFamily::PreferentialAttachment { m0 },
        n,
        GenOptions::default(),
        rng,
    )
}

fn sample_erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).expect("generated edges are in range")
}

fn sample_geometric<R: Rng + ?Sized>(n: usize, r: f64, rng: &mut R) -> Graph {
    let positions: Vec<[f64; 2]> = (0..n).map(|_| [rng.random(), rng.random()]).collect();
    Graph::geometric(positions, r)
}

impl Graph {
    /// Symmetric digraph linking every pair of `positions` closer than `r`.
    /// Radii above the unit-square diameter are capped at `sqrt(2)`.
    pub fn geometric(positions: Vec<[f64; 2]>, r: f64) -> Graph {
        let r = r.min(std::f64::consts::SQRT_2);
        let n = positions.len();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let dx = positions[i][0] - positions[j][0];
                let dy = positions[i][1] - positions[j][1];
                if (dx * dx + dy * dy).sqrt() < r {
                    pairs.push((i, j));
                }
            }
        }
        Graph::from_undirected(n, pairs)
            .and_then(|g| g.with_positions(positions))
            .expect("generated edges are in range")
    }
}

fn sample_barabasi_albert<R: Rng + ?Sized>(n: usize, m0: usize, rng: &mut R) -> Graph {
    let mut pairs = Vec::new();
    // One entry per edge endpoint; sampling from it is degree-proportional.
    let mut endpoints: Vec<usize> = Vec::new();
    for i in 0..m0 {
        for j in i + 1..m0 {
            pairs.push((i, j));
            endpoints.extend([i, j]);
        }
    }
    for v in m0.max(1)..n {
        let want = m0.min(v);
        let mut targets: Vec<usize> = Vec::with_capacity(want);
        while targets.len() < want {
            let t = if endpoints.is_empty() {
                rng.random_range(0..v)
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            pairs.push((t, v));
            endpoints.extend([t, v]);
        }
    }
    Graph::from_undirected(n, pairs).expect("generated edges are in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn er_with_p_one_is_complete() {
        let g = gen_erdos_renyi(3, 1.0, &mut seeded(0)).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g, Graph::complete(3));
    }

    #[test]
    fn er_is_deterministic_under_seed() {
        let a = gen_erdos_renyi(25, 0.3, &mut seeded(11)).unwrap();
        let b = gen_erdos_renyi(25, 0.3, &mut seeded(11)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn er_mean_edge_count_matches_binomial_expectation() {
        // Without the connectivity filter each of the 600 ordered pairs is
        // Bernoulli(0.3): mean 180, variance 600 * 0.3 * 0.7 = 126.
        let opts = GenOptions {
            require_strong_connectivity: false,
            ..Default::default()
        };
        let seeds = 1000;
        let total: usize = (0..seeds)
            .map(|s| {
                generate(GraphFamily::ErdosRenyi { p: 0.3 }, 25, opts, &mut seeded(s))
                    .unwrap()
                    .edge_count()
            })
            .sum();
        let mean = total as f64 / seeds as f64;
        let se = (126.0f64 / seeds as f64).sqrt();
        assert!((mean - 180.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn er_too_sparse_exhausts_retries() {
        let opts = GenOptions {
            require_strong_connectivity: true,
            max_retries: 5,
        };
        let err = generate(GraphFamily::ErdosRenyi { p: 1e-6 }, 30, opts, &mut seeded(1));
        assert_eq!(err, Err(GraphError::GenerationFailed(5)));
    }

    #[test]
    fn dg_two_nodes_at_full_radius_is_a_two_cycle() {
        let g = gen_directed_geometric(2, 10.0, &mut seeded(3)).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
        assert_eq!(g.positions().unwrap().len(), 2);
    }

    #[test]
    fn dg_is_deterministic_and_symmetric() {
        let a = gen_directed_geometric(10, 0.6, &mut seeded(5)).unwrap();
        let b = gen_directed_geometric(10, 0.6, &mut seeded(5)).unwrap();
        assert_eq!(a, b);
        assert!(a.is_symmetric());
        let small = gen_directed_geometric(10, 0.2, &mut seeded(5));
        let small2 = gen_directed_geometric(10, 0.2, &mut seeded(5));
        assert_eq!(small, small2);
    }

    #[test]
    fn dg_edge_count_is_monotone_in_radius() {
        let mut rng = seeded(8);
        for _ in 0..50 {
            let pos: Vec<[f64; 2]> = (0..25).map(|_| [rng.random(), rng.random()]).collect();
            let lo = Graph::geometric(pos.clone(), 0.2).edge_count();
            let hi = Graph::geometric(pos, 0.6).edge_count();
            assert!(hi >= lo);
        }
    }

    #[test]
    fn pa_with_single_seed_is_a_tree() {
        let g = gen_preferential_attachment(3, 1, &mut seeded(2)).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert!(g.is_symmetric());
        let big = gen_preferential_attachment(25, 1, &mut seeded(4)).unwrap();
        assert_eq!(big.edge_count(), 2 * 24);
        assert_eq!(big, gen_preferential_attachment(25, 1, &mut seeded(4)).unwrap());
    }

    #[test]
    fn pa_rejects_bad_m0() {
        assert!(matches!(
            gen_preferential_attachment(5, 5, &mut seeded(0)),
            Err(GraphError::InvalidParameter(_))
        ));
        assert!(matches!(
            gen_preferential_attachment(5, 0, &mut seeded(0)),
            Err(GraphError::InvalidParameter(_))
        ));
    }

    #[test]
    fn pa_more_attachments_grow_bigger_hubs() {
        let max_deg = |m0: usize, seed: u64| {
            let g = gen_preferential_attachment(50, m0, &mut seeded(seed)).unwrap();
            (0..50).map(|i| g.out_neighbors(i).len()).max().unwrap()
        };
        let mut m1: Vec<usize> = (0..100).map(|s| max_deg(1, s)).collect();
        m1.sort_unstable();
        let median_m1 = m1[50];
        let best_m2 = (0..100).map(|s| max_deg(2, s)).max().unwrap();
        assert!(best_m2 > median_m1, "{best_m2} vs {median_m1}");
    }

    #[test]
    fn generators_honor_strong_connectivity() {
        for s in 0..20 {
            for fam in [
                GraphFamily::ErdosRenyi { p: 0.1 },
                GraphFamily::DirectedGeometric { r: 0.2 },
                GraphFamily::PreferentialAttachment { m0: 2 },
            ] {
                let g = generate(fam, 25, GenOptions::default(), &mut seeded(s)).unwrap();
                assert!(is_strongly_connected(&g));
            }
        }
    }
}
