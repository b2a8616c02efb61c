//! TOML experiment specifications: parsing, defaults, validation and sweep expansion.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};
use spanfl_core::graph::DEFAULT_MAX_RETRIES;
use spanfl_core::sim::{
    AdversaryTracker, DataSpec, FailureSpec, Seeds, SimulationConfig, TrackerMixing,
};
use spanfl_core::{GraphFamily, HoppingParams, Strategy};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
}

/// Accepts either a single value or a list.
fn one_or_many<'de, D, T>(d: D) -> Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(match Either::deserialize(d)? {
        Either::One(x) => vec![x],
        Either::Many(v) => v,
    })
}

/// Node and link failure settings; the named ones are the four dynamics levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureSetting {
    None,
    Low,
    Mild,
    Moderate,
    High,
    Custom { p_node: f64, p_link: f64 },
}

impl FailureSetting {
    pub const TABLE: [FailureSetting; 4] = [Self::Low, Self::Mild, Self::Moderate, Self::High];

    pub fn spec(self) -> Option<FailureSpec> {
        let (p_node, p_link) = match self {
            Self::None => return None,
            Self::Low => (0.1, 0.02),
            Self::Mild => (0.15, 0.05),
            Self::Moderate => (0.20, 0.1),
            Self::High => (0.3, 0.2),
            Self::Custom { p_node, p_link } => (p_node, p_link),
        };
        Some(FailureSpec { p_node, p_link })
    }
}

impl fmt::Display for FailureSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::None => f.write_str("none"),
            Self::Low => f.write_str("low"),
            Self::Mild => f.write_str("mild"),
            Self::Moderate => f.write_str("moderate"),
            Self::High => f.write_str("high"),
            Self::Custom { p_node, p_link } => write!(f, "pn{p_node}-pl{p_link}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Training {
    pub epochs: usize,
    pub alpha: f64,
    pub local_iters: usize,
    pub tracker_mixing: TrackerMixing,
    pub adversary_tracker: AdversaryTracker,
    pub init_scale: f64,
}

impl Default for Training {
    fn default() -> Self {
        Self {
            epochs: 60,
            alpha: 0.05,
            local_iters: 1,
            tracker_mixing: TrackerMixing::default(),
            adversary_tracker: AdversaryTracker::default(),
            init_scale: 0.01,
        }
    }
}

/// Data shape shared by every cell; the class split is a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    pub classes: usize,
    pub dim: usize,
    pub samples_per_node: usize,
    pub test_per_class: usize,
    pub spread: f64,
}

impl Default for DataConfig {
    fn default() -> Self {
        let d = DataSpec::default();
        Self {
            classes: d.classes,
            dim: d.dim,
            samples_per_node: d.samples_per_node,
            test_per_class: d.test_per_class,
            spread: d.spread,
        }
    }
}

fn default_name() -> String {
    "experiment".into()
}
fn default_output() -> PathBuf {
    PathBuf::from("results")
}
fn default_sizes() -> Vec<usize> {
    vec![25]
}
fn default_seeds() -> Vec<u64> {
    (1..=20).collect()
}
fn default_epsilon() -> Vec<f64> {
    vec![500.0]
}
fn default_eps_scale() -> f64 {
    0.002
}
fn default_attack_epoch() -> Vec<usize> {
    vec![15]
}
fn default_failures() -> Vec<FailureSetting> {
    vec![FailureSetting::None]
}
fn default_retries() -> usize {
    DEFAULT_MAX_RETRIES
}

/// A sweep over simulation settings. Every list-valued field is an axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(deserialize_with = "one_or_many")]
    pub graphs: Vec<GraphFamily>,
    #[serde(default = "default_sizes", deserialize_with = "one_or_many")]
    pub n: Vec<usize>,
    #[serde(deserialize_with = "one_or_many")]
    pub strategies: Vec<Strategy>,
    /// Absolute adversary counts. Mutually exclusive with `adversary_fraction`.
    #[serde(default, deserialize_with = "one_or_many")]
    pub n_advs: Vec<usize>,
    /// Adversary share of `n`, rounded to the nearest count; 0.2 if neither is given.
    #[serde(default, deserialize_with = "one_or_many")]
    pub adversary_fraction: Vec<f64>,
    #[serde(default = "default_seeds", deserialize_with = "one_or_many")]
    pub seeds: Vec<u64>,
    /// Attack power on the image-pixel scale; multiplied by `eps_scale`.
    #[serde(default = "default_epsilon", deserialize_with = "one_or_many")]
    pub epsilon: Vec<f64>,
    #[serde(default = "default_eps_scale")]
    pub eps_scale: f64,
    #[serde(default = "default_attack_epoch", deserialize_with = "one_or_many")]
    pub attack_epoch: Vec<usize>,
    /// Classes held by each node; defaults to all classes (IID).
    #[serde(default, deserialize_with = "one_or_many")]
    pub classes_per_node: Vec<usize>,
    #[serde(default = "default_failures", deserialize_with = "one_or_many")]
    pub failures: Vec<FailureSetting>,
    #[serde(default)]
    pub training: Training,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub hopping: HoppingParams,
    #[serde(default = "default_retries")]
    pub max_retries: usize,
}

/// How the adversary count of a cell was specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdversaryCount {
    Absolute(usize),
    Fraction(f64),
}

impl AdversaryCount {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            Self::Absolute(k) => k,
            Self::Fraction(f) => (n as f64 * f).round() as usize,
        }
    }
}

/// One simulation of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub run_id: String,
    /// Non-graph sweep settings as `key=value` pairs joined by `;`.
    pub params: String,
    pub config: SimulationConfig,
    pub seed: u64,
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

impl ExperimentSpec {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let spec: ExperimentSpec = toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| line_col(text, s.start))
                .unwrap_or((0, 0));
            ConfigError::Parse {
                path: path.to_path_buf(),
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, path)
    }

    /// Canonical TOML with every default written out.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec is always representable")
    }

    fn class_splits(&self) -> Vec<usize> {
        if self.classes_per_node.is_empty() {
            vec![self.data.classes]
        } else {
            self.classes_per_node.clone()
        }
    }

    fn adversary_counts(&self) -> Vec<AdversaryCount> {
        if !self.n_advs.is_empty() {
            self.n_advs.iter().map(|&k| AdversaryCount::Absolute(k)).collect()
        } else if !self.adversary_fraction.is_empty() {
            self.adversary_fraction.iter().map(|&f| AdversaryCount::Fraction(f)).collect()
        } else {
            vec![AdversaryCount::Fraction(0.2)]
        }
    }

    /// Every violated constraint across the spec and all expanded cells.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.n_advs.is_empty() && !self.adversary_fraction.is_empty() {
            out.push("n_advs and adversary_fraction are mutually exclusive".to_string());
        }
        for &f in &self.adversary_fraction {
            if !(0.0..=1.0).contains(&f) {
                out.push(format!("adversary_fraction = {f} outside [0, 1]"));
            }
        }
        if !(self.eps_scale > 0.0 && self.eps_scale.is_finite()) {
            out.push(format!("eps_scale = {} must be finite and > 0", self.eps_scale));
        }
        let mut seen = BTreeSet::new();
        for cell in self.expand_unchecked() {
            for v in cell.config.violations() {
                if seen.insert(v.clone()) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(v))
        }
    }

    /// Number of cells without building them.
    pub fn cell_count(&self) -> usize {
        self.graphs.len()
            * self.n.len()
            * self.failures.len()
            * self.class_splits().len()
            * self.attack_epoch.len()
            * self.epsilon.len()
            * self.adversary_counts().len()
            * self.strategies.len()
            * self.seeds.len()
    }

    /// Cells in a fixed order: graph, n, failures, class split, attack epoch,
    /// epsilon, adversary count, strategy, seed (slowest to fastest).
    pub fn expand(&self) -> Result<Vec<Cell>, ConfigError> {
        self.validate()?;
        Ok(self.expand_unchecked())
    }

    fn expand_unchecked(&self) -> Vec<Cell> {
        let mut cells = Vec::with_capacity(self.cell_count());
        for &family in &self.graphs {
            for &n in &self.n {
                for &failure in &self.failures {
                    for k in self.class_splits() {
                        for &t in &self.attack_epoch {
                            for &eps in &self.epsilon {
                                for count in self.adversary_counts() {
                                    for &strategy in &self.strategies {
                                        for &seed in &self.seeds {
                                            let n_advs = count.resolve(n);
                                            cells.push(self.cell(
                                                cells.len(),
                                                family,
                                                n,
                                                failure,
                                                k,
                                                t,
                                                eps,
                                                n_advs,
                                                strategy,
                                                seed,
                                            ));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        cells
    }

    #[allow(clippy::too_many_arguments)]
    fn cell(
        &self,
        index: usize,
        family: GraphFamily,
        n: usize,
        failure: FailureSetting,
        k: usize,
        t: usize,
        eps: f64,
        n_advs: usize,
        strategy: Strategy,
        seed: u64,
    ) -> Cell {
        let config = SimulationConfig {
            family,
            n,
            strategy,
            hopping: self.hopping,
            n_advs,
            attack_epoch: t,
            epsilon: eps * self.eps_scale,
            alpha: self.training.alpha,
            epochs: self.training.epochs,
            local_iters: self.training.local_iters,
            tracker_mixing: self.training.tracker_mixing,
            adversary_tracker: self.training.adversary_tracker,
            data: DataSpec {
                classes: self.data.classes,
                dim: self.data.dim,
                samples_per_node: self.data.samples_per_node,
                test_per_class: self.data.test_per_class,
                spread: self.data.spread,
                classes_per_node: k,
            },
            failures: failure.spec(),
            seeds: Seeds::from_base(seed),
            init_scale: self.training.init_scale,
            max_retries: self.max_retries,
        };
        let graph = format!("{}{}", family.short_name(), fmt_num(family.param()));
        let run_id = format!(
            "{}_{graph}_n{n}_a{n_advs}_e{}_t{t}_k{k}_{failure}_s{seed}",
            strategy.id(),
            fmt_num(eps)
        );
        let params = format!(
            "{}={};eps={};t={t};k={k};fail={failure}",
            family.param_name(),
            fmt_num(family.param()),
            fmt_num(eps)
        );
        Cell {
            index,
            run_id,
            params,
            config,
            seed,
        }
    }
}

/// 1-based line and column of a byte offset.
pub(crate) fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
    (line, column)
}
