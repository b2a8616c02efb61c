use rand::Rng;

use super::{Graph, GraphError};

/// A degraded graph plus the map from original to surviving node indices.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureOutcome {
    pub graph: Graph,
    /// `index_map[old] = Some(new)` for survivors.
    pub index_map: Vec<Option<usize>>,
}

impl FailureOutcome {
    /// Inverse map: original index of each surviving node.
    pub fn survivors(&self) -> Vec<usize> {
        let mut out = vec![0; self.graph.n()];
        for (old, new) in self.index_map.iter().enumerate() {
            if let Some(new) = *new {
                out[new] = old;
            }
        }
        out
    }
}

/// Removes each node with probability `p_node`, then each surviving edge with
/// probability `p_link`. Survivors are re-indexed contiguously in their
/// original order. The result may be disconnected.
pub fn apply_failures<R: Rng + ?Sized>(
    g: &Graph,
    p_node: f64,
    p_link: f64,
    rng: &mut R,
) -> Result<FailureOutcome, GraphError> {
    for (name, p) in [("p_node", p_node), ("p_link", p_link)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(GraphError::InvalidParameter(format!(
                "{name} = {p} outside [0, 1]"
            )));
        }
    }
    let mut index_map = vec![None; g.n()];
    let mut next = 0;
    for slot in index_map.iter_mut() {
        if rng.random::<f64>() >= p_node {
            *slot = Some(next);
            next += 1;
        }
    }
    if next == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let mut edges = Vec::new();
    for (i, j) in g.edges() {
        if let (Some(a), Some(b)) = (index_map[i], index_map[j]) {
            if rng.random::<f64>() >= p_link {
                edges.push((a, b));
            }
        }
    }
    let mut graph = Graph::from_edges(next, edges)?;
    if let Some(pos) = g.positions() {
        let kept = pos
            .iter()
            .zip(&index_map)
            .filter(|(_, m)| m.is_some())
            .map(|(p, _)| *p)
            .collect();
        graph = graph.with_positions(kept)?;
    }
    Ok(FailureOutcome { graph, index_map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_directed_geometric;
    use crate::rng::seeded;

    #[test]
    fn zero_probabilities_are_identity() {
        let g = gen_directed_geometric(20, 0.4, &mut seeded(1)).unwrap();
        let out = apply_failures(&g, 0.0, 0.0, &mut seeded(2)).unwrap();
        assert_eq!(out.graph, g);
        assert_eq!(out.index_map, (0..20).map(Some).collect::<Vec<_>>());
        assert_eq!(out.survivors(), (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn total_node_failure_is_an_error() {
        let g = Graph::complete(5);
        assert_eq!(
            apply_failures(&g, 1.0, 0.0, &mut seeded(0)),
            Err(GraphError::EmptyGraph)
        );
    }

    #[test]
    fn link_failures_only_remove_edges() {
        let g = Graph::complete(10);
        let out = apply_failures(&g, 0.0, 1.0, &mut seeded(0)).unwrap();
        assert_eq!(out.graph.n(), 10);
        assert_eq!(out.graph.edge_count(), 0);
    }

    #[test]
    fn survivors_keep_their_edges_under_new_indices() {
        let g = Graph::directed_cycle(12);
        let out = apply_failures(&g, 0.3, 0.0, &mut seeded(9)).unwrap();
        let back = out.survivors();
        for (a, b) in out.graph.edges() {
            assert!(g.has_edge(back[a], back[b]));
        }
        for (i, j) in g.edges() {
            if let (Some(a), Some(b)) = (out.index_map[i], out.index_map[j]) {
                assert!(out.graph.has_edge(a, b));
            }
        }
    }

    #[test]
    fn low_dynamics_mean_survivors() {
        // Binomial(100, 0.9): mean 90, variance 9.
        let g = Graph::complete(100);
        let seeds = 1000;
        let total: usize = (0..seeds)
            .map(|s| apply_failures(&g, 0.1, 0.02, &mut seeded(s)).unwrap().graph.n())
            .sum();
        let mean = total as f64 / seeds as f64;
        let se = (9.0f64 / seeds as f64).sqrt();
        assert!((mean - 90.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn rejects_out_of_range_probabilities() {
        let g = Graph::complete(3);
        assert!(matches!(
            apply_failures(&g, -0.1, 0.0, &mut seeded(0)),
            Err(GraphError::InvalidParameter(_))
        ));
    }
}
