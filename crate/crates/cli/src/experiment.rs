//! Sweep execution: one simulation pair per cell, per-cell trace files, and a
//! single aggregation pass in cell order.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spanfl_core::metrics::mean_stderr;
use spanfl_core::sim::run_simulation;
use spanfl_core::EpochMetrics;

use crate::config::{Cell, ExperimentSpec};

pub const WORKERS_ENV: &str = "SPANFL_WORKERS";

/// One line of a trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub epoch: usize,
    pub run_id: String,
    pub variant: String,
    pub avg_honest_test_acc: f64,
    pub n_honest_alive: usize,
}

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub strategy: String,
    pub graph_family: String,
    pub params: String,
    pub n: usize,
    pub n_advs: usize,
    pub seed: u64,
    pub aal: f64,
}

/// One line of `aggregate.csv`: all seeds of a setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub strategy: String,
    pub graph_family: String,
    pub params: String,
    pub n: usize,
    pub n_advs: usize,
    pub mean_aal: f64,
    pub stderr_aal: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRow {
    pub run_id: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub cells: usize,
    pub summary: Vec<SummaryRow>,
    pub aggregate: Vec<AggregateRow>,
    pub failures: Vec<FailureRow>,
}

impl RunReport {
    /// True when there was work to do and none of it succeeded.
    pub fn total_failure(&self) -> bool {
        self.cells > 0 && self.summary.is_empty()
    }
}

/// Worker count from the environment; `None` when unset.
pub fn workers_from_env() -> anyhow::Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .with_context(|| format!("{WORKERS_ENV}={v:?} is not a positive integer"))?;
            anyhow::ensure!(n > 0, "{WORKERS_ENV} must be positive");
            Ok(Some(n))
        }
    }
}

pub fn trace_path(out_dir: &Path, run_id: &str, variant: &str) -> PathBuf {
    out_dir.join("traces").join(format!("{run_id}_{variant}.csv"))
}

fn trace_rows(run_id: &str, variant: &str, trace: &[EpochMetrics]) -> Vec<TraceRow> {
    trace
        .iter()
        .map(|m| TraceRow {
            epoch: m.epoch,
            run_id: run_id.to_string(),
            variant: variant.to_string(),
            avg_honest_test_acc: m.accuracy,
            n_honest_alive: m.n_honest_alive,
        })
        .collect()
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> anyhow::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let rows = r
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .with_context(|| format!("malformed {}", path.display()))?;
    Ok(rows)
}

const TRACE_HEADER: [&str; 5] = ["epoch", "run_id", "variant", "avg_honest_test_acc", "n_honest_alive"];
const SUMMARY_HEADER: [&str; 7] = ["strategy", "graph_family", "params", "n", "n_advs", "seed", "aal"];
const AGGREGATE_HEADER: [&str; 8] = [
    "strategy", "graph_family", "params", "n", "n_advs", "mean_aal", "stderr_aal", "count",
];

fn run_cell(cell: &Cell, out_dir: &Path) -> anyhow::Result<SummaryRow> {
    let r = run_simulation(&cell.config)?;
    for (variant, trace) in [("attacked", &r.attacked), ("baseline", &r.baseline)] {
        let rows = trace_rows(&cell.run_id, variant, trace);
        write_csv(&trace_path(out_dir, &cell.run_id, variant), &rows, &TRACE_HEADER)?;
    }
    Ok(SummaryRow {
        strategy: cell.config.strategy.id().to_string(),
        graph_family: cell.config.family.short_name().to_string(),
        params: cell.params.clone(),
        n: cell.config.n,
        n_advs: cell.config.n_advs,
        seed: cell.seed,
        aal: r.aal,
    })
}

/// Groups summary rows by everything except the seed, keeping first-seen order.
pub fn aggregate(summary: &[SummaryRow]) -> Vec<AggregateRow> {
    type Key = (String, String, String, usize, usize);
    let mut order: Vec<Key> = Vec::new();
    let mut groups: HashMap<Key, Vec<f64>> = HashMap::new();
    for r in summary {
        let key = (r.strategy.clone(), r.graph_family.clone(), r.params.clone(), r.n, r.n_advs);
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r.aal);
    }
    order
        .into_iter()
        .map(|key| {
            let xs = &groups[&key];
            let (mean, se) = mean_stderr(xs);
            AggregateRow {
                strategy: key.0,
                graph_family: key.1,
                params: key.2,
                n: key.3,
                n_advs: key.4,
                mean_aal: mean,
                stderr_aal: se,
                count: xs.len(),
            }
        })
        .collect()
}

/// Runs every cell on a pool of `workers` threads (all cores when `None`) and
/// writes `traces/`, `summary.csv`, `aggregate.csv`, `failures.csv` and the
/// resolved `config.toml` under `out_dir`.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: &Path, workers: Option<usize>) -> anyhow::Result<RunReport> {
    let cells = spec.expand()?;
    fs::create_dir_all(out_dir.join("traces"))
        .with_context(|| format!("cannot create {}", out_dir.display()))?;
    fs::write(out_dir.join("config.toml"), spec.to_toml())?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build()?;
    let results: Vec<anyhow::Result<SummaryRow>> =
        pool.install(|| cells.par_iter().map(|c| run_cell(c, out_dir)).collect());

    let mut summary = Vec::new();
    let mut failures = Vec::new();
    for (cell, res) in cells.iter().zip(results) {
        match res {
            Ok(row) => summary.push(row),
            Err(e) => failures.push(FailureRow {
                run_id: cell.run_id.clone(),
                error: format!("{e:#}"),
            }),
        }
    }
    let agg = aggregate(&summary);
    write_csv(&out_dir.join("summary.csv"), &summary, &SUMMARY_HEADER)?;
    write_csv(&out_dir.join("aggregate.csv"), &agg, &AGGREGATE_HEADER)?;
    write_csv(&out_dir.join("failures.csv"), &failures, &["run_id", "error"])?;
    Ok(RunReport {
        out_dir: out_dir.to_path_buf(),
        cells: cells.len(),
        summary,
        aggregate: agg,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(strategy: &str, seed: u64, aal: f64) -> SummaryRow {
        SummaryRow {
            strategy: strategy.into(),
            graph_family: "dg".into(),
            params: "r=0.2".into(),
            n: 25,
            n_advs: 5,
            seed,
            aal,
        }
    }

    #[test]
    fn aggregate_keeps_first_seen_order() {
        let rows = vec![row("maxspan", 1, 1.0), row("random", 1, 4.0), row("maxspan", 2, 3.0)];
        let agg = aggregate(&rows);
        assert_eq!(agg.len(), 2);
        assert_eq!(agg[0].strategy, "maxspan");
        assert_eq!(agg[0].mean_aal, 2.0);
        assert_eq!(agg[0].stderr_aal, 1.0);
        assert_eq!(agg[0].count, 2);
        assert_eq!(agg[1].count, 1);
    }
}
