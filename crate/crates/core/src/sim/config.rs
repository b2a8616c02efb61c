use serde::{Deserialize, Serialize};

use super::engine::{AdversaryTracker, TrackerMixing};
use super::SimError;
use crate::graph::DEFAULT_MAX_RETRIES;
use crate::rng::stream;
use crate::{GraphFamily, HoppingParams, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSpec {
    pub classes: usize,
    pub dim: usize,
    pub samples_per_node: usize,
    pub test_per_class: usize,
    pub spread: f64,
    /// `classes` means IID.
    pub classes_per_node: usize,
}

impl Default for DataSpec {
    fn default() -> Self {
        Self {
            classes: 10,
            dim: 20,
            samples_per_node: 40,
            test_per_class: 50,
            spread: 0.3,
            classes_per_node: 10,
        }
    }
}

/// Node and link failure probabilities, applied once at the attack epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureSpec {
    pub p_node: f64,
    pub p_link: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    pub graph: u64,
    pub data: u64,
    pub placement: u64,
    pub training: u64,
    pub failure: u64,
}

impl Seeds {
    /// Independent sub-seeds derived from one base seed.
    pub fn from_base(seed: u64) -> Self {
        use rand::RngCore;
        let mut rng = stream(seed, 0x5EED);
        Self {
            graph: rng.next_u64(),
            data: rng.next_u64(),
            placement: rng.next_u64(),
            training: rng.next_u64(),
            failure: rng.next_u64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub family: GraphFamily,
    pub n: usize,
    pub strategy: Strategy,
    pub hopping: HoppingParams,
    pub n_advs: usize,
    pub attack_epoch: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub epochs: usize,
    pub local_iters: usize,
    pub tracker_mixing: TrackerMixing,
    pub adversary_tracker: AdversaryTracker,
    pub data: DataSpec,
    pub failures: Option<FailureSpec>,
    pub seeds: Seeds,
    /// Standard deviation of the shared random initial model.
    pub init_scale: f64,
    pub max_retries: usize,
}

impl SimulationConfig {
    pub fn new(family: GraphFamily, n: usize, strategy: Strategy, n_advs: usize, seed: u64) -> Self {
        Self {
            family,
            n,
            strategy,
            hopping: HoppingParams::default(),
            n_advs,
            attack_epoch: 15,
            epsilon: 1.0,
            alpha: 0.05,
            epochs: 60,
            local_iters: 1,
            tracker_mixing: TrackerMixing::default(),
            adversary_tracker: AdversaryTracker::default(),
            data: DataSpec::default(),
            failures: None,
            seeds: Seeds::from_base(seed),
            init_scale: 0.01,
            max_retries: DEFAULT_MAX_RETRIES,
        }
    }

    /// Every violated constraint, one message per field.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Err(e) = self.family.validate(self.n) {
            out.push(format!("graph: {e}"));
        }
        if self.n_advs > self.n {
            out.push(format!("n_advs = {} exceeds n = {}", self.n_advs, self.n));
        }
        if self.attack_epoch > self.epochs {
            out.push(format!(
                "attack_epoch = {} exceeds epochs = {}",
                self.attack_epoch, self.epochs
            ));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            out.push(format!("epsilon = {} must be finite and >= 0", self.epsilon));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            out.push(format!("alpha = {} must be finite and > 0", self.alpha));
        }
        if self.local_iters == 0 {
            out.push("local_iters must be >= 1".into());
        }
        let d = &self.data;
        if d.classes < 2 {
            out.push(format!("data.classes = {} must be >= 2", d.classes));
        }
        if d.dim == 0 {
            out.push("data.dim must be >= 1".into());
        }
        if d.samples_per_node == 0 {
            out.push("data.samples_per_node must be >= 1".into());
        }
        if d.test_per_class == 0 {
            out.push("data.test_per_class must be >= 1".into());
        }
        if !(d.spread >= 0.0 && d.spread.is_finite()) {
            out.push(format!("data.spread = {} must be finite and >= 0", d.spread));
        }
        if d.classes_per_node == 0 || d.classes_per_node > d.classes {
            out.push(format!(
                "data.classes_per_node = {} must lie in 1..={}",
                d.classes_per_node, d.classes
            ));
        }
        if let Some(f) = &self.failures {
            for (name, p) in [("failures.p_node", f.p_node), ("failures.p_link", f.p_link)] {
                if !(0.0..=1.0).contains(&p) {
                    out.push(format!("{name} = {p} outside [0, 1]"));
                }
            }
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            out.push(format!("init_scale = {} must be finite and >= 0", self.init_scale));
        }
        out
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(v))
        }
    }
}
