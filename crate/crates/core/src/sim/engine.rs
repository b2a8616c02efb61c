//! Synchronous gradient-tracking rounds over a (possibly degraded) digraph.

use serde::{Deserialize, Serialize};

use super::data::Dataset;
use super::model::{fgsm_poison, loss_and_grad};
use crate::graph::FailureOutcome;
use crate::Graph;

/// A node's private loss.
pub trait LocalObjective: Sync {
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    /// Gradient of the loss an adversary optimizes when attacking with power `epsilon`.
    fn poisoned_gradient(&self, x: &[f64], epsilon: f64) -> Vec<f64>;
}

/// Softmax cross-entropy on a local shard.
#[derive(Debug, Clone)]
pub struct ShardObjective {
    pub shard: Dataset,
}

impl LocalObjective for ShardObjective {
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        loss_and_grad(x, &self.shard).1
    }

    fn poisoned_gradient(&self, x: &[f64], epsilon: f64) -> Vec<f64> {
        loss_and_grad(x, &fgsm_poison(&self.shard, x, epsilon)).1
    }
}

/// `0.5 * sum_k curvature[k] * (x[k] - center[k])^2`. Poisoning moves the
/// center up by `epsilon` in every coordinate.
#[derive(Debug, Clone)]
pub struct Quadratic {
    pub center: Vec<f64>,
    pub curvature: Vec<f64>,
}

impl LocalObjective for Quadratic {
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.center)
            .zip(&self.curvature)
            .map(|((x, c), a)| a * (x - c))
            .collect()
    }

    fn poisoned_gradient(&self, x: &[f64], epsilon: f64) -> Vec<f64> {
        x.iter()
            .zip(&self.center)
            .zip(&self.curvature)
            .map(|((x, c), a)| a * (x - c - epsilon))
            .collect()
    }
}

/// Weights used to mix neighbor trackers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrackerMixing {
    /// Uniform average over in-neighbors and self.
    #[default]
    InSelf,
    /// Push-pull: node `j` splits its tracker evenly over itself and its
    /// out-neighbors, so the tracker sum is conserved and the exact optimum
    /// is reached on irregular digraphs too.
    ColumnStochastic,
    /// Uniform average over out-neighbors only.
    LiteralOut,
}

/// What an attacking node broadcasts as its tracker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryTracker {
    #[default]
    PoisonedGradient,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Role {
    Honest,
    Adversary { epsilon: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub model: Vec<f64>,
    pub tracker: Vec<f64>,
    /// Local gradient at `model`, reused as the previous-gradient term.
    pub grad: Vec<f64>,
    pub role: Role,
}

impl NodeState {
    /// Starts at `model` with the tracker set to the local gradient.
    pub fn new<O: LocalObjective + ?Sized>(model: Vec<f64>, role: Role, objective: &O) -> Self {
        let grad = objective.gradient(&model);
        Self {
            model,
            tracker: grad.clone(),
            grad,
            role,
        }
    }
}

/// Live adjacency in original node indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub alive: Vec<bool>,
    pub inc: Vec<Vec<usize>>,
    pub out: Vec<Vec<usize>>,
}

impl Topology {
    pub fn from_graph(g: &Graph) -> Self {
        Self {
            alive: vec![true; g.n()],
            inc: (0..g.n()).map(|i| g.in_neighbors(i).to_vec()).collect(),
            out: (0..g.n()).map(|i| g.out_neighbors(i).to_vec()).collect(),
        }
    }

    /// Topology of the surviving graph, expressed in the original indices.
    pub fn from_failure(n: usize, outcome: &FailureOutcome) -> Self {
        let back = outcome.survivors();
        let mut t = Self {
            alive: vec![false; n],
            inc: vec![Vec::new(); n],
            out: vec![Vec::new(); n],
        };
        for (new, &old) in back.iter().enumerate() {
            t.alive[old] = true;
            t.inc[old] = outcome.graph.in_neighbors(new).iter().map(|&j| back[j]).collect();
            t.out[old] = outcome.graph.out_neighbors(new).iter().map(|&j| back[j]).collect();
        }
        t
    }
}

fn axpy(acc: &mut [f64], w: f64, x: &[f64]) {
    for (a, v) in acc.iter_mut().zip(x) {
        *a += w * v;
    }
}

fn mixed_tracker(states: &[NodeState], topo: &Topology, i: usize, mixing: TrackerMixing) -> Vec<f64> {
    let mut acc = vec![0.0; states[i].tracker.len()];
    match mixing {
        TrackerMixing::ColumnStochastic => {
            axpy(&mut acc, 1.0 / (topo.out[i].len() + 1) as f64, &states[i].tracker);
            for &j in &topo.inc[i] {
                axpy(&mut acc, 1.0 / (topo.out[j].len() + 1) as f64, &states[j].tracker);
            }
        }
        TrackerMixing::InSelf => {
            let w = 1.0 / (topo.inc[i].len() + 1) as f64;
            axpy(&mut acc, w, &states[i].tracker);
            for &j in &topo.inc[i] {
                axpy(&mut acc, w, &states[j].tracker);
            }
        }
        TrackerMixing::LiteralOut => {
            if topo.out[i].is_empty() {
                acc.copy_from_slice(&states[i].tracker);
            } else {
                let w = 1.0 / topo.out[i].len() as f64;
                for &j in &topo.out[i] {
                    axpy(&mut acc, w, &states[j].tracker);
                }
            }
        }
    }
    acc
}

/// Step sizes and mixing rules shared by every node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    pub alpha: f64,
    pub local_iters: usize,
    pub mixing: TrackerMixing,
    pub adversary_tracker: AdversaryTracker,
}

/// Gradient-tracking update of node `i` from the previous snapshot `states`.
/// Extra local iterations repeat a plain gradient step on the new model.
pub fn honest_step<O: LocalObjective + ?Sized>(
    states: &[NodeState],
    topo: &Topology,
    objective: &O,
    i: usize,
    params: &StepParams,
) -> NodeState {
    let me = &states[i];
    let w = 1.0 / (topo.inc[i].len() + 1) as f64;
    let mut model = vec![0.0; me.model.len()];
    axpy(&mut model, w, &me.model);
    for &j in &topo.inc[i] {
        axpy(&mut model, w, &states[j].model);
    }
    axpy(&mut model, -params.alpha, &me.tracker);
    let mut grad = objective.gradient(&model);
    for _ in 1..params.local_iters {
        axpy(&mut model, -params.alpha, &grad);
        grad = objective.gradient(&model);
    }
    let mut tracker = mixed_tracker(states, topo, i, params.mixing);
    axpy(&mut tracker, 1.0, &grad);
    axpy(&mut tracker, -1.0, &me.grad);
    NodeState {
        model,
        tracker,
        grad,
        role: me.role,
    }
}

/// Attack update: plain descent on FGSM-poisoned data, ignoring neighbors.
pub fn adversary_step<O: LocalObjective + ?Sized>(
    state: &NodeState,
    objective: &O,
    epsilon: f64,
    params: &StepParams,
) -> NodeState {
    let mut model = state.model.clone();
    let mut grad = Vec::new();
    for _ in 0..params.local_iters.max(1) {
        grad = objective.poisoned_gradient(&model, epsilon);
        axpy(&mut model, -params.alpha, &grad);
    }
    let tracker = match params.adversary_tracker {
        AdversaryTracker::PoisonedGradient => grad.clone(),
        AdversaryTracker::Zero => vec![0.0; grad.len()],
    };
    NodeState {
        model,
        tracker,
        grad,
        role: state.role,
    }
}

/// Full network state for one run.
pub struct Network<'a, O: LocalObjective> {
    pub states: Vec<NodeState>,
    pub topology: Topology,
    pub objectives: &'a [O],
    pub params: StepParams,
}

impl<'a, O: LocalObjective> Network<'a, O> {
    /// Every node starts from `x0` with its tracker at its local gradient.
    pub fn new(
        graph: &Graph,
        objectives: &'a [O],
        x0: &[f64],
        roles: &[Role],
        params: StepParams,
    ) -> Self {
        assert_eq!(objectives.len(), graph.n());
        assert_eq!(roles.len(), graph.n());
        let states = objectives
            .iter()
            .zip(roles)
            .map(|(o, &r)| NodeState::new(x0.to_vec(), r, o))
            .collect();
        Self {
            states,
            topology: Topology::from_graph(graph),
            objectives,
            params,
        }
    }

    /// One synchronous round. Adversaries attack only when `attack_active`.
    pub fn step(&mut self, attack_active: bool) {
        let next: Vec<NodeState> = (0..self.states.len())
            .map(|i| {
                if !self.topology.alive[i] {
                    return self.states[i].clone();
                }
                match self.states[i].role {
                    Role::Adversary { epsilon } if attack_active => adversary_step(
                        &self.states[i],
                        &self.objectives[i],
                        epsilon,
                        &self.params,
                    ),
                    _ => honest_step(
                        &self.states,
                        &self.topology,
                        &self.objectives[i],
                        i,
                        &self.params,
                    ),
                }
            })
            .collect();
        self.states = next;
    }

    /// Switches to a degraded topology. Trackers of nodes still following the
    /// honest rule restart from their local gradients, since removed nodes
    /// take their share of the tracked sum with them.
    pub fn set_topology(&mut self, topology: Topology, attack_active: bool) {
        self.topology = topology;
        for s in &mut self.states {
            let attacking = matches!(s.role, Role::Adversary { .. }) && attack_active;
            if !attacking {
                s.tracker.clone_from(&s.grad);
            }
        }
    }

    pub fn mean_model(&self, nodes: &[usize]) -> Vec<f64> {
        let mut acc = vec![0.0; self.states[nodes[0]].model.len()];
        for &i in nodes {
            axpy(&mut acc, 1.0, &self.states[i].model);
        }
        acc.iter_mut().for_each(|a| *a /= nodes.len() as f64);
        acc
    }

    /// `max_i ||x_i - mean||` over `nodes`.
    pub fn consensus_error(&self, nodes: &[usize]) -> f64 {
        let mean = self.mean_model(nodes);
        nodes
            .iter()
            .map(|&i| {
                self.states[i]
                    .model
                    .iter()
                    .zip(&mean)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}
