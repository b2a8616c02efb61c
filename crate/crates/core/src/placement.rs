//! Adversary selection strategies.
//!
//! All strategies return exactly `n_advs` distinct nodes. Ties are broken by
//! ascending node index everywhere so placements are reproducible.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    bfs_cluster, clustering_coefficients, degree_centrality, degree_variance_normalized,
    eigenvector_centrality, CentralityVector, Graph, GraphError,
};
use crate::rng::seeded;

pub const CENTRALITY_TOL: f64 = 1e-12;
pub const CENTRALITY_MAX_ITER: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlacementError {
    #[error("cannot place {n_advs} adversaries on {n} nodes")]
    BadCount { n_advs: usize, n: usize },
    #[error("hop probability needs more than one node (got {0})")]
    DegenerateSize(usize),
    #[error("unknown strategy `{0}` (expected random, eigen, degree, maxspan, maxspan-hop)")]
    UnknownStrategy(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Strategy {
    Random,
    Eigen,
    Degree,
    MaxSpan,
    MaxSpanHop,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Random,
        Strategy::Eigen,
        Strategy::Degree,
        Strategy::MaxSpan,
        Strategy::MaxSpanHop,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Eigen => "eigen",
            Strategy::Degree => "degree",
            Strategy::MaxSpan => "maxspan",
            Strategy::MaxSpanHop => "maxspan-hop",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Strategy {
    type Err = PlacementError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.id() == s)
            .ok_or_else(|| PlacementError::UnknownStrategy(s.to_string()))
    }
}

impl TryFrom<String> for Strategy {
    type Error = PlacementError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Strategy> for String {
    fn from(s: Strategy) -> String {
        s.id().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentralityMeasure {
    Eigenvector,
    Degree,
}

/// Decision-boundary vector `alpha` and decay `lambda` of the hop rule.
///
/// The defaults put the logistic midpoint at normalized clustering and
/// normalized degree variance of 0.5.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoppingParams {
    pub alpha: [f64; 3],
    pub lambda: f64,
}

impl Default for HoppingParams {
    fn default() -> Self {
        Self {
            alpha: [5.0, -0.5, -0.5],
            lambda: 1.0,
        }
    }
}

/// Where one adversary started and the nodes it hopped through.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopTrace {
    pub start: usize,
    pub hops: Vec<usize>,
}

impl HopTrace {
    pub fn end(&self) -> usize {
        self.hops.last().copied().unwrap_or(self.start)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarySet {
    pub members: Vec<usize>,
    pub strategy: Strategy,
    pub hop_trace: Option<Vec<HopTrace>>,
    pub seed: Option<u64>,
}

impl AdversarySet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.members.contains(&node)
    }

    /// Membership mask over `0..n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &a in &self.members {
            m[a] = true;
        }
        m
    }
}

fn check_count(g: &Graph, n_advs: usize) -> Result<(), PlacementError> {
    if n_advs == 0 || n_advs > g.n() {
        return Err(PlacementError::BadCount { n_advs, n: g.n() });
    }
    Ok(())
}

fn set(members: Vec<usize>, strategy: Strategy) -> AdversarySet {
    AdversarySet {
        members,
        strategy,
        hop_trace: None,
        seed: None,
    }
}

/// Runs `strategy` with a fresh generator for `seed`, recording the seed.
/// `n_advs = 0` yields an empty set for every strategy.
pub fn place(
    strategy: Strategy,
    g: &Graph,
    n_advs: usize,
    params: &HoppingParams,
    seed: u64,
) -> Result<AdversarySet, PlacementError> {
    if n_advs == 0 {
        return Ok(AdversarySet {
            seed: Some(seed),
            ..set(Vec::new(), strategy)
        });
    }
    let mut rng = seeded(seed);
    let mut out = match strategy {
        Strategy::Random => place_random(g, n_advs, &mut rng),
        Strategy::Eigen => place_centrality(g, n_advs, CentralityMeasure::Eigenvector),
        Strategy::Degree => place_centrality(g, n_advs, CentralityMeasure::Degree),
        Strategy::MaxSpan => place_maxspan(g, n_advs, &mut rng),
        Strategy::MaxSpanHop => place_maxspan_hopping(g, n_advs, params, &mut rng),
    }?;
    out.seed = Some(seed);
    Ok(out)
}

/// Uniform sample without replacement.
pub fn place_random<R: Rng + ?Sized>(
    g: &Graph,
    n_advs: usize,
    rng: &mut R,
) -> Result<AdversarySet, PlacementError> {
    check_count(g, n_advs)?;
    let members = sample(rng, g.n(), n_advs).into_vec();
    Ok(set(members, Strategy::Random))
}

/// Top-`n_advs` nodes by eigenvector or degree centrality.
pub fn place_centrality(
    g: &Graph,
    n_advs: usize,
    measure: CentralityMeasure,
) -> Result<AdversarySet, PlacementError> {
    check_count(g, n_advs)?;
    let (scores, strategy): (Vec<f64>, _) = match measure {
        CentralityMeasure::Eigenvector => (
            eigenvector_centrality(g, CENTRALITY_TOL, CENTRALITY_MAX_ITER)?.values,
            Strategy::Eigen,
        ),
        CentralityMeasure::Degree => (
            degree_centrality(g).into_iter().map(|d| d as f64).collect(),
            Strategy::Degree,
        ),
    };
    let mut idx: Vec<usize> = (0..g.n()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx.truncate(n_advs);
    Ok(set(idx, strategy))
}

/// `floor(n / n_advs)`, at least 1.
pub fn cluster_area(n: usize, n_advs: usize) -> usize {
    (n / n_advs.max(1)).max(1)
}

/// BFS influence region of every node.
pub fn influence_regions(g: &Graph, s_cluster: usize) -> Vec<Vec<usize>> {
    (0..g.n()).map(|v| bfs_cluster(g, v, s_cluster)).collect()
}

/// MaxSpAN-FL: a random first adversary, then greedily the node whose
/// influence region overlaps least with the regions already taken.
pub fn place_maxspan<R: Rng + ?Sized>(
    g: &Graph,
    n_advs: usize,
    rng: &mut R,
) -> Result<AdversarySet, PlacementError> {
    check_count(g, n_advs)?;
    let first = rng.random_range(0..g.n());
    place_maxspan_from(g, n_advs, first)
}

/// MaxSpAN-FL with the first adversary fixed.
pub fn place_maxspan_from(
    g: &Graph,
    n_advs: usize,
    first: usize,
) -> Result<AdversarySet, PlacementError> {
    check_count(g, n_advs)?;
    let n = g.n();
    let regions = influence_regions(g, cluster_area(n, n_advs));
    let mut covered = vec![false; n];
    let mut taken = vec![false; n];
    let mut members = Vec::with_capacity(n_advs);
    let mut next = Some(first);
    while let Some(v) = next {
        taken[v] = true;
        members.push(v);
        for &u in &regions[v] {
            covered[u] = true;
        }
        if members.len() == n_advs {
            break;
        }
        // Strict `<` keeps the lowest index among equal overlaps.
        let mut best: Option<(usize, usize)> = None;
        for u in (0..n).filter(|&u| !taken[u]) {
            let overlap = regions[u].iter().filter(|&&w| covered[w]).count();
            if best.is_none_or(|(o, _)| overlap < o) {
                best = Some((overlap, u));
            }
        }
        next = best.map(|(_, u)| u);
    }
    Ok(set(members, Strategy::MaxSpan))
}

/// Probability of one more hop after `t` hops:
/// `1 / (1 + exp(a0 (c + a1)(s + a2))) * exp(-lambda t / ln n)`.
pub fn hop_probability(
    c_hat: f64,
    var_hat: f64,
    params: &HoppingParams,
    t: usize,
    n: usize,
) -> Result<f64, PlacementError> {
    if n <= 1 {
        return Err(PlacementError::DegenerateSize(n));
    }
    let [a0, a1, a2] = params.alpha;
    let z = a0 * (c_hat + a1) * (var_hat + a2);
    // exp overflow gives inf and 1 / inf = 0, which is the right limit.
    let logistic = 1.0 / (1.0 + z.exp());
    let decay = (-params.lambda * t as f64 / (n as f64).ln()).exp();
    Ok(logistic * decay)
}

// Guards against two adversaries trading places forever when lambda = 0.
fn hop_cap(n: usize) -> usize {
    n
}

/// Hopping-augmented MaxSpAN-FL: after the MaxSpAN-FL placement each
/// adversary repeatedly moves to its most central out-neighbor outside the
/// current adversary set, with a probability that falls with every hop.
pub fn place_maxspan_hopping<R: Rng + ?Sized>(
    g: &Graph,
    n_advs: usize,
    params: &HoppingParams,
    rng: &mut R,
) -> Result<AdversarySet, PlacementError> {
    let base = place_maxspan(g, n_advs, rng)?;
    let centrality = eigenvector_centrality(g, CENTRALITY_TOL, CENTRALITY_MAX_ITER)?;
    let (members, traces) = hop_adversaries(g, base.members, &centrality, params, rng)?;
    Ok(AdversarySet {
        members,
        strategy: Strategy::MaxSpanHop,
        hop_trace: Some(traces),
        seed: None,
    })
}

/// The hopping stage on its own, applied to an existing placement.
pub fn hop_adversaries<R: Rng + ?Sized>(
    g: &Graph,
    mut members: Vec<usize>,
    centrality: &CentralityVector,
    params: &HoppingParams,
    rng: &mut R,
) -> Result<(Vec<usize>, Vec<HopTrace>), PlacementError> {
    let n = g.n();
    let var_hat = degree_variance_normalized(g);
    let cc = clustering_coefficients(g);
    let c_min = cc.iter().copied().fold(f64::INFINITY, f64::min);
    let c_max = cc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut traces = Vec::with_capacity(members.len());
    for idx in 0..members.len() {
        let start = members[idx];
        // Normalized clustering of the starting node, fixed for the walk.
        let c_hat = if c_max > c_min {
            (cc[start] - c_min) / (c_max - c_min)
        } else {
            0.0
        };
        let mut hops = Vec::new();
        let mut a = start;
        for t in 0..hop_cap(n) {
            let p = hop_probability(c_hat, var_hat, params, t, n)?;
            if rng.random::<f64>() >= p {
                break;
            }
            let best = g
                .out_neighbors(a)
                .iter()
                .copied()
                .filter(|v| !members.contains(v))
                .min_by(|&x, &y| {
                    centrality.values[y]
                        .total_cmp(&centrality.values[x])
                        .then(x.cmp(&y))
                });
            let Some(next) = best else { break };
            members[idx] = next;
            a = next;
            hops.push(next);
        }
        traces.push(HopTrace { start, hops });
    }
    Ok((members, traces))
}
