//! Configuration and report writing for the deviation-bound verifier.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spanfl_core::graph::eigenvector_centrality;
use spanfl_core::theory::{circulant, max_spread_set, verify_lemma1, LemmaRow, LemmaScenario, TheoryError};

use crate::config::{line_col, ConfigError};

/// Which honest-graph nodes turn adversarial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaPlacement {
    /// Set with the largest total pairwise hop distance (exhaustive search).
    #[default]
    Spread,
    /// Highest eigenvector centrality.
    Eigen,
    /// Nodes `0..k`.
    First,
}

fn default_output() -> PathBuf {
    PathBuf::from("lemma_report.csv")
}
fn default_nodes() -> usize {
    8
}
fn default_offsets() -> Vec<usize> {
    vec![1, 4]
}
fn default_advs() -> Vec<usize> {
    vec![1, 2, 3]
}
fn default_deltas() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}
fn default_alpha() -> f64 {
    0.05
}
fn default_horizon() -> usize {
    20
}
fn default_trials() -> usize {
    200
}
fn default_dim() -> usize {
    2
}
fn default_seed() -> u64 {
    1
}

/// Scenario grid on a circulant graph: every pair of adversary count and
/// gradient floor becomes one report row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaSpec {
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    /// Circulant offsets; each contributes both directions.
    #[serde(default = "default_offsets")]
    pub offsets: Vec<usize>,
    #[serde(default = "default_advs")]
    pub n_advs: Vec<usize>,
    #[serde(default = "default_deltas")]
    pub delta_min: Vec<f64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub placement: LemmaPlacement,
    /// Seeds the node losses.
    #[serde(default = "default_seed")]
    pub data_seed: u64,
    /// Seeds the minibatch draws, shared by all scenarios.
    #[serde(default = "default_seed")]
    pub trial_seed: u64,
}

impl Default for LemmaSpec {
    fn default() -> Self {
        toml::from_str("").expect("all fields have defaults")
    }
}

impl LemmaSpec {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((0, 0));
            ConfigError::Parse {
                path: path.to_path_buf(),
                line,
                column,
                message: e.message().to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, path)
    }

    /// Builds every scenario; structural problems surface as config errors.
    pub fn scenarios(&self) -> Result<Vec<(String, LemmaScenario)>, ConfigError> {
        let mut problems = Vec::new();
        if self.trials < 2 {
            problems.push(format!("trials = {} must be at least 2", self.trials));
        }
        if self.offsets.iter().any(|&o| o == 0 || o > self.nodes / 2) {
            problems.push(format!("offsets {:?} must lie in 1..={}", self.offsets, self.nodes / 2));
        }
        if !problems.is_empty() {
            return Err(ConfigError::Invalid(problems));
        }
        let graph = circulant(self.nodes, &self.offsets);
        let mut out = Vec::new();
        for &k in &self.n_advs {
            let advs: Result<Vec<usize>, TheoryError> = match self.placement {
                LemmaPlacement::First => Ok((0..k).collect()),
                LemmaPlacement::Spread => max_spread_set(&graph, k),
                LemmaPlacement::Eigen => eigenvector_centrality(&graph, 1e-12, 10_000)
                    .map(|c| c.ranking().into_iter().take(k).collect())
                    .map_err(TheoryError::from),
            };
            for &delta in &self.delta_min {
                let id = format!("a{k}_d{delta}");
                let built = advs.clone().and_then(|a| {
                    LemmaScenario::synthetic(
                        graph.clone(),
                        a,
                        delta,
                        self.alpha,
                        self.horizon,
                        self.dim,
                        self.data_seed,
                    )
                });
                match built {
                    Ok(s) => out.push((id, s)),
                    Err(e) => problems.push(format!("{id}: {e}")),
                }
            }
        }
        if problems.is_empty() {
            Ok(out)
        } else {
            Err(ConfigError::Invalid(problems))
        }
    }

    pub fn run(&self) -> anyhow::Result<Vec<LemmaRow>> {
        let scenarios = self.scenarios()?;
        Ok(verify_lemma1(&scenarios, self.trials, self.trial_seed)?)
    }
}

pub fn write_report<W: Write>(rows: &[LemmaRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "scenario_id", "n", "d", "n_advs", "delta_min", "alpha", "T", "trials", "lhs", "rhs", "margin",
        "stderr", "pass",
    ])?;
    for r in rows {
        w.write_record([
            r.scenario_id.clone(),
            r.n.to_string(),
            r.d.to_string(),
            r.n_advs.to_string(),
            r.delta_min.to_string(),
            r.alpha.to_string(),
            r.horizon.to_string(),
            r.trials.to_string(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.margin.to_string(),
            r.stderr.to_string(),
            r.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
