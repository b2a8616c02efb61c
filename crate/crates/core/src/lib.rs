//! Adversarial node placement in decentralized federated learning.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: directed graphs, random generators, topology metrics and
//!   failure dynamics.
//! * [`placement`]: adversary selection (random, centrality, MaxSpAN-FL and
//!   its hopping-augmented variant).
//! * [`sim`]: a desk-scale decentralized training engine with gradient
//!   tracking, FGSM data poisoning and attack timing.
//! * [`metrics`]: attack accuracy loss and relative attack advantage.
//! * [`theory`]: a Monte Carlo checker for the adversarial deviation lower
//!   bound and a runtime probe for MaxSpAN-FL.

pub mod graph;
pub mod metrics;
pub mod placement;
pub mod rng;
pub mod sim;
pub mod theory;

pub use graph::{CentralityVector, Graph, GraphError, GraphFamily};
pub use metrics::{EpochMetrics, MetricError};
pub use placement::{AdversarySet, HoppingParams, PlacementError, Strategy};
pub use sim::{SimError, SimulationConfig, SimulationResult};
