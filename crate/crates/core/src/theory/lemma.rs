use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use super::TheoryError;
use crate::graph::{eigenvector_centrality, total_pairwise_distance};
use crate::rng::{seeded, stream};
use crate::Graph;

/// Undirected circulant graph: `i` is linked to `i +- o (mod n)` for each offset.
pub fn circulant(n: usize, offsets: &[usize]) -> Graph {
    let mut pairs = Vec::new();
    for i in 0..n {
        for &o in offsets {
            let j = (i + o) % n;
            if i != j && !pairs.contains(&(j.min(i), j.max(i))) {
                pairs.push((i.min(j), i.max(j)));
            }
        }
    }
    Graph::from_undirected(n, pairs).expect("indices are reduced mod n")
}

/// The `k`-subset with the largest total pairwise hop distance, by
/// exhaustive search in lexicographic order (first maximum wins).
pub fn max_spread_set(g: &Graph, k: usize) -> Result<Vec<usize>, TheoryError> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(TheoryError::InvalidScenario(format!("cannot pick {k} of {n} nodes")));
    }
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let d = total_pairwise_distance(g, &idx)?;
        if best.as_ref().is_none_or(|(b, _)| d > *b) {
            best = Some((d, idx.clone()));
        }
        let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            break;
        };
        idx[pos] += 1;
        for i in pos + 1..k {
            idx[i] = idx[i - 1] + 1;
        }
    }
    Ok(best.expect("at least one subset").1)
}

/// Common degree of a symmetric regular graph.
fn regular_degree(g: &Graph) -> Result<usize, TheoryError> {
    if !g.is_symmetric() {
        return Err(TheoryError::NotSymmetric);
    }
    let degrees: Vec<usize> = (0..g.n()).map(|i| g.out_neighbors(i).len()).collect();
    let min = degrees.iter().copied().min().unwrap_or(0);
    let max = degrees.iter().copied().max().unwrap_or(0);
    if min != max || min == 0 {
        return Err(TheoryError::NotRegular { min, max });
    }
    Ok(min)
}

fn step_unchecked(g: &Graph, d: usize, states: &[Vec<f64>], alpha: f64, grads: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..g.n())
        .map(|i| {
            let mut x = vec![0.0; states[i].len()];
            for &j in g.out_neighbors(i) {
                for (a, v) in x.iter_mut().zip(&states[j]) {
                    *a += v;
                }
            }
            x.iter_mut()
                .zip(&grads[i])
                .for_each(|(a, g)| *a = *a / d as f64 - alpha * g);
            x
        })
        .collect()
}

/// `x_i <- sum_{j in N(i)} x_j / d - alpha * grads[i]`, with no self term.
pub fn consensus_only_step(
    states: &[Vec<f64>],
    g: &Graph,
    alpha: f64,
    grads: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>, TheoryError> {
    let d = regular_degree(g)?;
    if states.len() != g.n() || grads.len() != g.n() {
        return Err(TheoryError::InvalidScenario(format!(
            "{} states and {} gradients for {} nodes",
            states.len(),
            grads.len(),
            g.n()
        )));
    }
    Ok(step_unchecked(g, d, states, alpha, grads))
}

/// `f(x) = mean_k 0.5 * (a_k . x - b_k)^2` over `m` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub dim: usize,
    pub features: Vec<f64>,
    pub targets: Vec<f64>,
}

impl LeastSquares {
    /// Rows `a ~ N(0, feature_sd^2)`, targets `a . center + N(0, noise^2)`.
    pub fn synthetic<R: Rng + ?Sized>(
        m: usize,
        center: &[f64],
        feature_sd: f64,
        noise: f64,
        rng: &mut R,
    ) -> Self {
        let dim = center.len();
        let fa = Normal::new(0.0, feature_sd).expect("finite sd");
        let fe = Normal::new(0.0, noise).expect("finite sd");
        let mut features = Vec::with_capacity(m * dim);
        let mut targets = Vec::with_capacity(m);
        for _ in 0..m {
            let row: Vec<f64> = (0..dim).map(|_| fa.sample(rng)).collect();
            targets.push(row.iter().zip(center).map(|(a, c)| a * c).sum::<f64>() + fe.sample(rng));
            features.extend(row);
        }
        Self {
            dim,
            features,
            targets,
        }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Mean gradient over the rows in `batch`.
    pub fn batch_gradient(&self, x: &[f64], batch: &[usize]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for &k in batch {
            let a = &self.features[k * self.dim..(k + 1) * self.dim];
            let r = a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() - self.targets[k];
            for (gi, ai) in g.iter_mut().zip(a) {
                *gi += r * ai;
            }
        }
        g.iter_mut().for_each(|v| *v /= batch.len() as f64);
        g
    }
}

/// Everything needed to run the paired attacked/honest trajectories.
#[derive(Debug, Clone)]
pub struct LemmaScenario {
    pub graph: Graph,
    pub degree: usize,
    pub adversaries: Vec<usize>,
    pub delta_min: f64,
    pub alpha: f64,
    pub horizon: usize,
    pub losses: Vec<LeastSquares>,
    pub batch_size: usize,
    /// Initial model shared by every node in both runs.
    pub x0: Vec<f64>,
}

impl LemmaScenario {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        graph: Graph,
        adversaries: Vec<usize>,
        delta_min: f64,
        alpha: f64,
        horizon: usize,
        losses: Vec<LeastSquares>,
        batch_size: usize,
        x0: Vec<f64>,
    ) -> Result<Self, TheoryError> {
        let degree = regular_degree(&graph)?;
        let n = graph.n();
        let bad = |msg: String| Err(TheoryError::InvalidScenario(msg));
        let mut sorted = adversaries.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != adversaries.len() || sorted.iter().any(|&a| a >= n) {
            return bad(format!("adversaries {adversaries:?} must be distinct nodes below {n}"));
        }
        if losses.len() != n {
            return bad(format!("{} losses for {n} nodes", losses.len()));
        }
        if losses.iter().any(|l| l.dim != x0.len() || l.is_empty()) {
            return bad("every loss needs rows of the model dimension".into());
        }
        if batch_size == 0 || losses.iter().any(|l| l.len() < batch_size) {
            return bad(format!("batch size {batch_size} must lie in 1..=rows"));
        }
        if !(alpha >= 0.0 && alpha.is_finite() && delta_min.is_finite()) {
            return bad(format!("alpha = {alpha}, delta_min = {delta_min}"));
        }
        Ok(Self {
            graph,
            degree,
            adversaries,
            delta_min,
            alpha,
            horizon,
            losses,
            batch_size,
            x0,
        })
    }

    /// Least-squares nodes with 20 rows each, optima drawn around the origin,
    /// half-batch stochastic gradients and a zero initial model.
    pub fn synthetic(
        graph: Graph,
        adversaries: Vec<usize>,
        delta_min: f64,
        alpha: f64,
        horizon: usize,
        dim: usize,
        data_seed: u64,
    ) -> Result<Self, TheoryError> {
        let mut rng = seeded(data_seed);
        let spread = Normal::new(0.0, 0.5).expect("finite sd");
        let losses = (0..graph.n())
            .map(|_| {
                let center: Vec<f64> = (0..dim).map(|_| spread.sample(&mut rng)).collect();
                LeastSquares::synthetic(20, &center, 0.3, 0.1, &mut rng)
            })
            .collect();
        Self::new(graph, adversaries, delta_min, alpha, horizon, losses, 10, vec![0.0; dim])
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Unit-norm non-negative Perron vector of the adjacency matrix.
    pub fn perron(&self) -> Result<Vec<f64>, TheoryError> {
        Ok(eigenvector_centrality(&self.graph, 1e-14, 1_000_000)?.values)
    }
}

/// Monte Carlo estimates of both sides of the bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaSides {
    pub lhs: f64,
    pub rhs: f64,
    /// Mean of `alpha^2 * ||sum_j v_j sum_i (attacked_j - honest_j)||^2`, the
    /// projection of the deviation onto `v`. Always at most `lhs`.
    pub projected: f64,
    /// Standard error of the per-trial difference `lhs - rhs`.
    pub stderr: f64,
    pub trials: usize,
}

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Runs `trials` paired trajectories for `horizon + 1` steps. Both runs draw
/// the same minibatches; adversaries in the attacked run clamp every gradient
/// coordinate to at least `delta_min`.
pub fn lemma1_sides(s: &LemmaScenario, trials: usize, seed: u64) -> Result<LemmaSides, TheoryError> {
    if trials == 0 {
        return Err(TheoryError::InvalidScenario("trials must be >= 1".into()));
    }
    let n = s.n();
    let p = s.x0.len();
    let v = s.perron()?;
    let mut is_adv = vec![false; n];
    for &a in &s.adversaries {
        is_adv[a] = true;
    }
    let mut diffs = Vec::with_capacity(trials);
    let (mut lhs_sum, mut rhs_sum, mut proj_sum) = (0.0, 0.0, 0.0);
    for trial in 0..trials {
        let mut rng = stream(seed, trial as u64);
        let mut x = vec![s.x0.clone(); n];
        let mut xh = vec![s.x0.clone(); n];
        let mut sum_adv = vec![0.0; p];
        let mut sum_hon = vec![0.0; p];
        let mut sum_all = vec![0.0; p];
        for _ in 0..=s.horizon {
            let mut grads = Vec::with_capacity(n);
            let mut grads_h = Vec::with_capacity(n);
            for j in 0..n {
                let loss = &s.losses[j];
                let batch = sample(&mut rng, loss.len(), s.batch_size).into_vec();
                let mut g = loss.batch_gradient(&x[j], &batch);
                let gh = loss.batch_gradient(&xh[j], &batch);
                if is_adv[j] {
                    g.iter_mut().for_each(|c| *c = c.max(s.delta_min));
                }
                for k in 0..p {
                    sum_all[k] += v[j] * (g[k] - gh[k]);
                }
                if is_adv[j] {
                    for k in 0..p {
                        sum_adv[k] += v[j] * (s.delta_min - gh[k]);
                    }
                } else {
                    for k in 0..p {
                        sum_hon[k] += v[j] * (g[k] - gh[k]);
                    }
                }
                grads.push(g);
                grads_h.push(gh);
            }
            x = step_unchecked(&s.graph, s.degree, &x, s.alpha, &grads);
            xh = step_unchecked(&s.graph, s.degree, &xh, s.alpha, &grads_h);
        }
        let lhs: f64 = x.iter().zip(&xh).map(|(a, b)| {
            a.iter().zip(b).map(|(u, w)| (u - w) * (u - w)).sum::<f64>()
        }).sum();
        let a2 = s.alpha * s.alpha;
        let rhs = a2 * sq_norm(&sum_adv) - a2 * sq_norm(&sum_hon);
        lhs_sum += lhs;
        rhs_sum += rhs;
        proj_sum += a2 * sq_norm(&sum_all);
        diffs.push(lhs - rhs);
    }
    let (_, stderr) = crate::metrics::mean_stderr(&diffs);
    Ok(LemmaSides {
        lhs: lhs_sum / trials as f64,
        rhs: rhs_sum / trials as f64,
        projected: proj_sum / trials as f64,
        stderr,
        trials,
    })
}

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaRow {
    pub scenario_id: String,
    pub n: usize,
    pub d: usize,
    pub n_advs: usize,
    pub delta_min: f64,
    pub alpha: f64,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub trials: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub projected: f64,
    pub margin: f64,
    pub stderr: f64,
    pub pass: bool,
}

/// Evaluates every scenario with the same trial seeds. A row passes when
/// `lhs >= rhs - 3 * stderr`.
pub fn verify_lemma1(
    scenarios: &[(String, LemmaScenario)],
    trials: usize,
    seed: u64,
) -> Result<Vec<LemmaRow>, TheoryError> {
    scenarios
        .iter()
        .map(|(id, s)| {
            let sides = lemma1_sides(s, trials, seed)?;
            Ok(LemmaRow {
                scenario_id: id.clone(),
                n: s.n(),
                d: s.degree,
                n_advs: s.adversaries.len(),
                delta_min: s.delta_min,
                alpha: s.alpha,
                horizon: s.horizon,
                trials,
                lhs: sides.lhs,
                rhs: sides.rhs,
                projected: sides.projected,
                margin: sides.lhs - sides.rhs,
                stderr: sides.stderr,
                pass: sides.lhs >= sides.rhs - 3.0 * sides.stderr,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wagner() -> Graph {
        circulant(8, &[1, 4])
    }

    #[test]
    fn wagner_graph_is_cubic_and_symmetric() {
        let g = wagner();
        assert_eq!(regular_degree(&g), Ok(3));
        assert_eq!(g.edge_count(), 24);
    }

    #[test]
    fn irregular_or_directed_graphs_are_rejected() {
        let states = vec![vec![0.0]; 4];
        assert_eq!(
            consensus_only_step(&states, &Graph::directed_cycle(4), 0.1, &states),
            Err(TheoryError::NotSymmetric)
        );
        assert!(matches!(
            consensus_only_step(&states, &Graph::star(3), 0.1, &states),
            Err(TheoryError::NotRegular { min: 1, max: 3 })
        ));
    }

    #[test]
    fn zero_step_averaging_preserves_and_reaches_the_mean() {
        let g = wagner();
        let mut x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let zeros = vec![vec![0.0; 2]; 8];
        let mean0: Vec<f64> = (0..2).map(|k| x.iter().map(|r| r[k]).sum::<f64>() / 8.0).collect();
        for _ in 0..300 {
            x = consensus_only_step(&x, &g, 0.0, &zeros).unwrap();
            for k in 0..2 {
                let m: f64 = x.iter().map(|r| r[k]).sum::<f64>() / 8.0;
                assert!((m - mean0[k]).abs() < 1e-9);
            }
        }
        for r in &x {
            assert!((r[0] - mean0[0]).abs() < 1e-9 && (r[1] - mean0[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn one_step_matches_dense_matrix_form() {
        let g = wagner();
        let e = g.adjacency_matrix();
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![(i as f64).sin(), (i as f64).cos()]).collect();
        let grads: Vec<Vec<f64>> = (0..8).map(|i| vec![0.1 * i as f64, -0.2]).collect();
        let next = consensus_only_step(&x, &g, 0.3, &grads).unwrap();
        for i in 0..8 {
            for k in 0..2 {
                let mx: f64 = (0..8).map(|j| e[i][j] / 3.0 * x[j][k]).sum();
                assert!((next[i][k] - (mx - 0.3 * grads[i][k])).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn two_cycle_with_identical_quadratics_follows_the_linear_recursion() {
        // f(x) = 0.5 * c * (x - t)^2 on both nodes. The sum s and difference
        // d of the two states decouple: s' = s - a c (s - 2t), d' = -(1 + a c) d.
        let g = Graph::complete(2);
        let (a, c, t) = (0.1, 2.0, 3.0);
        let mut x = vec![vec![1.0], vec![-1.0]];
        for k in 1..=20 {
            let grads: Vec<Vec<f64>> = x.iter().map(|r| vec![c * (r[0] - t)]).collect();
            x = consensus_only_step(&x, &g, a, &grads).unwrap();
            let s = 2.0 * t + (0.0 - 2.0 * t) * (1.0 - a * c).powi(k);
            let d = 2.0 * (-(1.0 + a * c)).powi(k);
            assert!((x[0][0] + x[1][0] - s).abs() < 1e-12 * s.abs().max(1.0));
            assert!((x[0][0] - x[1][0] - d).abs() < 1e-12 * d.abs().max(1.0));
        }
    }

    #[test]
    fn perron_vector_is_fixed_by_the_mixing_matrix() {
        let s = LemmaScenario::synthetic(wagner(), vec![0], 1.0, 0.05, 5, 2, 1).unwrap();
        let v = s.perron().unwrap();
        let e = s.graph.adjacency_matrix();
        for i in 0..8 {
            let mv: f64 = (0..8).map(|j| e[i][j] / 3.0 * v[j]).sum();
            assert!((mv - v[i]).abs() < 1e-8);
            assert!((v[i] - 1.0 / 8f64.sqrt()).abs() < 1e-8);
        }
    }

    #[test]
    fn batch_gradient_matches_finite_differences() {
        let l = LeastSquares::synthetic(6, &[0.5, -1.0, 2.0], 1.0, 0.2, &mut seeded(3));
        let batch = [0, 2, 5];
        let x = [0.3, 0.1, -0.4];
        let f = |x: &[f64]| {
            batch.iter().map(|&k| {
                let a = &l.features[k * 3..k * 3 + 3];
                let r = a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() - l.targets[k];
                0.5 * r * r
            }).sum::<f64>() / batch.len() as f64
        };
        let g = l.batch_gradient(&x, &batch);
        for k in 0..3 {
            let mut p = x;
            let mut m = x;
            p[k] += 1e-6;
            m[k] -= 1e-6;
            assert!((g[k] - (f(&p) - f(&m)) / 2e-6).abs() < 1e-7);
        }
    }

    #[test]
    fn empty_adversary_set_gives_zero_on_both_sides() {
        let s = LemmaScenario::synthetic(wagner(), vec![], 1.0, 0.05, 20, 2, 4).unwrap();
        let sides = lemma1_sides(&s, 20, 9).unwrap();
        assert_eq!(sides.lhs, 0.0);
        assert_eq!(sides.rhs, 0.0);
    }

    #[test]
    fn bound_fails_when_the_clamp_never_binds() {
        // With the floor below every gradient the adversaries behave honestly,
        // so the trajectories coincide, yet the adversarial term of the bound
        // is a squared norm and stays positive.
        let s = LemmaScenario::synthetic(wagner(), vec![0, 5], -1e6, 0.05, 20, 2, 4).unwrap();
        let sides = lemma1_sides(&s, 20, 9).unwrap();
        assert_eq!(sides.lhs, 0.0);
        assert!(sides.rhs > 0.0);
    }

    #[test]
    fn spread_set_maximizes_pairwise_distance() {
        let g = Graph::from_undirected(5, vec![(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(max_spread_set(&g, 2).unwrap(), vec![0, 4]);
        assert_eq!(max_spread_set(&g, 3).unwrap(), vec![0, 1, 4]);
        assert!(max_spread_set(&g, 6).is_err());
    }

    #[test]
    fn sides_are_deterministic() {
        let s = LemmaScenario::synthetic(wagner(), vec![1, 6], 1.0, 0.05, 20, 2, 2).unwrap();
        assert_eq!(lemma1_sides(&s, 30, 5).unwrap(), lemma1_sides(&s, 30, 5).unwrap());
    }

    #[test]
    fn scenario_validation() {
        let err = LemmaScenario::synthetic(wagner(), vec![1, 1], 1.0, 0.05, 20, 2, 2);
        assert!(matches!(err, Err(TheoryError::InvalidScenario(_))));
        let err = LemmaScenario::synthetic(Graph::star(4), vec![1], 1.0, 0.05, 20, 2, 2);
        assert!(matches!(err, Err(TheoryError::NotRegular { .. })));
    }
}
