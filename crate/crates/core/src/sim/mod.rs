//! Desk-scale decentralized training with gradient tracking and data poisoning.

pub mod config;
pub mod data;
pub mod engine;
pub mod model;

use rand_distr::{Distribution, Normal};
use thiserror::Error;

pub use config::{DataSpec, FailureSpec, Seeds, SimulationConfig};
pub use data::Dataset;
pub use engine::{AdversaryTracker, Network, NodeState, Role, StepParams, TrackerMixing};
pub use model::Model;

use crate::graph::apply_failures;
use crate::graph::{generate, GenOptions};
use crate::metrics::{compute_aal, EpochMetrics};
use crate::placement::place;
use crate::rng::stream;
use crate::{AdversarySet, Graph, GraphError, PlacementError};
use engine::{ShardObjective, Topology};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),
    #[error("data: {0}")]
    Data(String),
    #[error("partition: {0}")]
    Partition(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error("no honest node survived the failures")]
    NoHonestSurvivors,
}

/// Training shards and the shared held-out test set.
#[derive(Debug, Clone)]
pub struct Workload {
    pub shards: Vec<Dataset>,
    pub test: Dataset,
}

impl Workload {
    pub fn pooled(&self) -> Dataset {
        Dataset::concat(&self.shards)
    }
}

pub fn build_graph(cfg: &SimulationConfig) -> Result<Graph, SimError> {
    let opts = GenOptions {
        require_strong_connectivity: true,
        max_retries: cfg.max_retries,
    };
    Ok(generate(cfg.family, cfg.n, opts, &mut stream(cfg.seeds.graph, 0))?)
}

pub fn build_workload(cfg: &SimulationConfig) -> Result<Workload, SimError> {
    let d = &cfg.data;
    let per_class = (cfg.n * d.samples_per_node).div_ceil(d.classes);
    let train = data::synth_dataset(d.classes, d.dim, per_class, d.spread, &mut stream(cfg.seeds.data, 1))?;
    let test = data::synth_dataset(d.classes, d.dim, d.test_per_class, d.spread, &mut stream(cfg.seeds.data, 2))?;
    let shards = data::partition(&train, cfg.n, d.classes_per_node, &mut stream(cfg.seeds.data, 3))?;
    Ok(Workload { shards, test })
}

fn initial_model(cfg: &SimulationConfig) -> Vec<f64> {
    let p = model::param_count(cfg.data.classes, cfg.data.dim);
    let mut rng = stream(cfg.seeds.training, 0);
    let normal = Normal::new(0.0, cfg.init_scale).expect("validated scale");
    (0..p).map(|_| normal.sample(&mut rng)).collect()
}

#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub attacked: Vec<EpochMetrics>,
    pub baseline: Vec<EpochMetrics>,
    pub adversaries: AdversarySet,
    pub graph: Graph,
    pub aal: f64,
    /// Final `max ||x_i - mean||` over surviving honest nodes of the baseline run.
    pub baseline_consensus_error: f64,
    /// Mean of the surviving honest models at the end of the baseline run.
    pub baseline_mean_model: Vec<f64>,
}

struct Trace {
    metrics: Vec<EpochMetrics>,
    consensus_error: f64,
    mean_model: Vec<f64>,
}

fn run_trace(
    cfg: &SimulationConfig,
    graph: &Graph,
    objectives: &[ShardObjective],
    test: &Dataset,
    roles: &[Role],
    honest: &[usize],
    degraded: Option<&Topology>,
) -> Result<Trace, SimError> {
    let params = StepParams {
        alpha: cfg.alpha,
        local_iters: cfg.local_iters,
        mixing: cfg.tracker_mixing,
        adversary_tracker: cfg.adversary_tracker,
    };
    let x0 = initial_model(cfg);
    let mut net = Network::new(graph, objectives, &x0, roles, params);
    let mut metric_set = honest.to_vec();
    let record = |net: &Network<ShardObjective>, metric_set: &[usize], epoch: usize| {
        let total: f64 = metric_set
            .iter()
            .map(|&i| model::accuracy(&net.states[i].model, test))
            .sum();
        EpochMetrics {
            epoch,
            accuracy: total / metric_set.len() as f64,
            n_honest_alive: metric_set.len(),
        }
    };
    let fail = |net: &mut Network<ShardObjective>, metric_set: &mut Vec<usize>, active: bool| {
        if let Some(topo) = degraded {
            net.set_topology(topo.clone(), active);
            metric_set.retain(|&i| topo.alive[i]);
            if metric_set.is_empty() {
                return Err(SimError::NoHonestSurvivors);
            }
        }
        Ok(())
    };
    let mut metrics = Vec::with_capacity(cfg.epochs + 1);
    if metric_set.is_empty() {
        return Err(SimError::NoHonestSurvivors);
    }
    metrics.push(record(&net, &metric_set, 0));
    if cfg.attack_epoch == 0 {
        fail(&mut net, &mut metric_set, true)?;
    }
    for t in 1..=cfg.epochs {
        net.step(t > cfg.attack_epoch);
        metrics.push(record(&net, &metric_set, t));
        if t == cfg.attack_epoch {
            fail(&mut net, &mut metric_set, true)?;
        }
    }
    Ok(Trace {
        metrics,
        consensus_error: net.consensus_error(&metric_set),
        mean_model: net.mean_model(&metric_set),
    })
}

/// Runs the attacked configuration and its adversary-free baseline on the
/// same graph, data, initial model and failure draw. Both traces average
/// test accuracy over the same honest nodes (those surviving failures).
pub fn run_simulation(cfg: &SimulationConfig) -> Result<SimulationResult, SimError> {
    cfg.validate()?;
    let graph = build_graph(cfg)?;
    let work = build_workload(cfg)?;
    let adversaries = place(cfg.strategy, &graph, cfg.n_advs, &cfg.hopping, cfg.seeds.placement)?;
    let objectives: Vec<ShardObjective> = work
        .shards
        .into_iter()
        .map(|shard| ShardObjective { shard })
        .collect();
    let degraded = match cfg.failures {
        Some(f) => {
            let outcome = apply_failures(&graph, f.p_node, f.p_link, &mut stream(cfg.seeds.failure, 0))?;
            Some(Topology::from_failure(cfg.n, &outcome))
        }
        None => None,
    };
    let mask = adversaries.mask(cfg.n);
    let honest: Vec<usize> = (0..cfg.n).filter(|&i| !mask[i]).collect();
    let roles: Vec<Role> = mask
        .iter()
        .map(|&adv| {
            if adv {
                Role::Adversary { epsilon: cfg.epsilon }
            } else {
                Role::Honest
            }
        })
        .collect();
    let attacked = run_trace(cfg, &graph, &objectives, &work.test, &roles, &honest, degraded.as_ref())?;
    let baseline = run_trace(
        cfg,
        &graph,
        &objectives,
        &work.test,
        &vec![Role::Honest; cfg.n],
        &honest,
        degraded.as_ref(),
    )?;
    let aal = compute_aal(&baseline.metrics, &attacked.metrics, cfg.attack_epoch)
        .expect("traces share the epoch grid");
    Ok(SimulationResult {
        attacked: attacked.metrics,
        baseline: baseline.metrics,
        adversaries,
        graph,
        aal,
        baseline_consensus_error: baseline.consensus_error,
        baseline_mean_model: baseline.mean_model,
    })
}
