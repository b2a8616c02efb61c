use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use spanfl_cli::config::{ConfigError, ExperimentSpec};
use spanfl_cli::experiment::{run_experiment, workers_from_env, write_csv};
use spanfl_cli::lemma::{write_report, LemmaSpec};
use spanfl_cli::plot::{plot_files, PlotKind};
use spanfl_cli::presets::{self, PRESETS};
use spanfl_core::theory::complexity_probe;

#[derive(Parser)]
#[command(name = "spanfl", version, about = "Adversarial placement experiments for decentralized federated learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep from a TOML file or a built-in preset.
    Run {
        /// Experiment file. Omit when using --preset.
        config: Option<PathBuf>,
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Output directory (overrides `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a trace or summary CSV as SVG.
    Plot {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        /// accuracy-vs-epoch (trace files) or aal-bars (summary.csv)
        #[arg(long)]
        kind: String,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Monte Carlo check of the adversarial deviation bound.
    VerifyLemma {
        config: Option<PathBuf>,
        /// Report path (overrides `output`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time MaxSpAN-FL placement on ER graphs of growing size.
    ComplexityProbe {
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,400")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0.2)]
        p: f64,
        #[arg(long, default_value_t = 0.2)]
        fraction: f64,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Optional CSV with one row per size.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inspect built-in sweeps.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// Name, cell count and description of every preset.
    List,
    /// Print a preset as an experiment file.
    Show { name: String },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn unknown_preset(name: &str) -> anyhow::Error {
    ConfigError::Invalid(vec![format!(
        "unknown preset {name:?}; see `spanfl presets list`"
    )])
    .into()
}

fn dispatch(cmd: Command) -> anyhow::Result<ExitCode> {
    match cmd {
        Command::Run { config, preset, out } => {
            let spec = match (config, preset) {
                (Some(path), None) => ExperimentSpec::load(&path)?,
                (None, Some(name)) => presets::find(&name).ok_or_else(|| unknown_preset(&name))?.spec(),
                _ => {
                    return Err(ConfigError::Invalid(vec!["give a config file or --preset".into()]).into())
                }
            };
            let workers = workers_from_env()
                .map_err(|e| ConfigError::Invalid(vec![e.to_string()]))?;
            let out_dir = out.unwrap_or_else(|| spec.output_dir.clone());
            let report = run_experiment(&spec, &out_dir, workers)?;
            eprintln!(
                "{} cells: {} succeeded, {} failed; results in {}",
                report.cells,
                report.summary.len(),
                report.failures.len(),
                out_dir.display()
            );
            for f in &report.failures {
                eprintln!("  {}: {}", f.run_id, f.error);
            }
            Ok(if report.total_failure() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Plot { csv, kind, output } => {
            let kind: PlotKind = kind.parse().map_err(|e| ConfigError::Invalid(vec![format!("{e}")]))?;
            let paths: Vec<&Path> = csv.iter().map(PathBuf::as_path).collect();
            let svg = plot_files(kind, &paths)?;
            std::fs::write(&output, svg).with_context(|| format!("cannot write {}", output.display()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyLemma { config, out } => {
            let spec = match config {
                Some(p) => LemmaSpec::load(&p)?,
                None => LemmaSpec::default(),
            };
            let rows = spec.run()?;
            let path = out.unwrap_or_else(|| spec.output.clone());
            let file = std::fs::File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
            write_report(&rows, file)?;
            let passed = rows.iter().filter(|r| r.pass).count();
            println!("{passed}/{} scenarios satisfy lhs >= rhs - 3 stderr", rows.len());
            for r in &rows {
                println!(
                    "{:<10} lhs {:.6e}  rhs {:.6e}  stderr {:.2e}  {}",
                    r.scenario_id,
                    r.lhs,
                    r.rhs,
                    r.stderr,
                    if r.pass { "pass" } else { "FAIL" }
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ComplexityProbe {
            sizes,
            p,
            fraction,
            repeats,
            seed,
            out,
        } => {
            let report = complexity_probe(&sizes, fraction, p, repeats, seed)
                .map_err(|e| ConfigError::Invalid(vec![e.to_string()]))?;
            for r in &report.rows {
                println!("n {:>5}  advs {:>4}  median {:.6} s  cv {:.3}", r.n, r.n_advs, r.median_secs, r.cv);
            }
            println!("log-log slope {:.3}", report.slope);
            if let Some(path) = out {
                write_csv(&path, &report.rows, &["n", "n_advs", "median_secs", "cv"])?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Presets { action } => {
            match action {
                PresetAction::List => {
                    for p in PRESETS {
                        println!("{:<22} {:>5} cells  {}", p.name, p.spec().cell_count(), p.description);
                    }
                }
                PresetAction::Show { name } => {
                    print!("{}", presets::find(&name).ok_or_else(|| unknown_preset(&name))?.spec().to_toml());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
