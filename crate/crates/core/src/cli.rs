//! The `inspectra` command line. Every subcommand prints one JSON object on
//! stdout; wall-clock timing is kept under the top-level `millis` key.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::colgen::{refine_with, ColgenOptions};
use crate::covers::{CoverMode, CoverSummary};
use crate::decomp::{decompose, MarginalTarget};
use crate::error::{Error, Result};
use crate::exact::solve_exact_ne;
use crate::game::{evaluate_profile, GameParams};
use crate::generate::{generate, Family, GenConfig};
use crate::model::DetectionModel;
use crate::planner::{plan_approx, plan_exact};
use crate::report::{covers_json, eval_json, exact_json, plan_json, refine_json, trace_csv};
use crate::strategies::{MixedStrategy, StrategyEntry, StrategyFile};
use crate::target::Alpha;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "inspectra", version, about = "Detector planning for strategic network inspection")]
struct Cli {
    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance when comparing a detection rate against the target.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true)]
    json_pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimum set cover and maximum set packing sizes.
    Covers {
        instance: PathBuf,
        #[arg(long)]
        greedy: bool,
    },
    /// Detector count and positioning strategy meeting a target rate.
    Plan {
        instance: PathBuf,
        #[command(flatten)]
        target: TargetArgs,
        /// Refine the cover-based plan by column generation.
        #[arg(long)]
        exact: bool,
        #[arg(long, conflicts_with = "exact")]
        greedy_covers: bool,
        #[arg(long)]
        max_iters: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Smallest detector count whose equilibrium rate meets the target.
    Refine {
        instance: PathBuf,
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Write per-iteration CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Equilibrium by enumerating actions (small instances only).
    SolveExact {
        instance: PathBuf,
        #[arg(long)]
        b1: usize,
        #[arg(long)]
        b2: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Payoffs, detection rate and ε of a strategy profile.
    Eval {
        instance: PathBuf,
        #[arg(long)]
        sigma1: PathBuf,
        #[arg(long)]
        sigma2: PathBuf,
    },
    /// Attack strategy over size-b2 plans with the given marginals.
    Decompose {
        /// JSON array of numbers, or an object from component id to number.
        #[arg(long)]
        marginals: PathBuf,
        #[arg(long)]
        b2: usize,
        /// Resolve component ids against this instance.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Random detection model.
    Gen {
        #[arg(long, default_value = "random-bipartite")]
        family: Family,
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        components: usize,
        #[arg(long, default_value_t = 2.0)]
        mean_size: f64,
        /// Write the instance here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct TargetArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    b2: usize,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Directory for strategy files.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let start = Instant::now();
    match dispatch(&cli) {
        Ok(Value::Object(mut payload)) => {
            payload.insert("millis".into(), json!(start.elapsed().as_millis() as u64));
            let text = if cli.json_pretty {
                serde_json::to_string_pretty(&payload)
            } else {
                serde_json::to_string(&payload)
            }
            .expect("payload serializes");
            let _ = writeln!(out, "{text}");
            EXIT_OK
        }
        Ok(other) => {
            let _ = writeln!(out, "{other}");
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_SOLVER
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Value> {
    match &cli.command {
        Command::Covers { instance, greedy } => {
            let model = DetectionModel::read(instance)?;
            let mode = if *greedy { CoverMode::Greedy } else { CoverMode::Exact };
            let covers = CoverSummary::compute(&model, mode)?;
            Ok(covers_json(&model, &covers))
        }
        Command::Plan {
            instance,
            target,
            exact,
            greedy_covers,
            max_iters,
            out,
        } => {
            let model = DetectionModel::read(instance)?;
            let alpha = Alpha::new(target.alpha)?;
            let report = if *exact {
                plan_exact(&model, alpha, target.b2, cli.tol, ColgenOptions { max_iters: *max_iters })?
            } else {
                let mode = if *greedy_covers { CoverMode::Greedy } else { CoverMode::Exact };
                plan_approx(&model, alpha, target.b2, mode)?
            };
            let payload = plan_json(&model, &report);
            if let Some(dir) = &out.out_dir {
                let (s1, s2) = match &report.refined {
                    Some(r) => (&r.sigma1, r.sigma2.as_ref().unwrap_or(&report.sigma2)),
                    None => (&report.sigma1, &report.sigma2),
                };
                write_strategy(dir, "sigma1.json", &s1.to_file(&model))?;
                write_strategy(dir, "sigma2.json", &s2.to_file(&model))?;
            }
            Ok(payload)
        }
        Command::Refine {
            instance,
            target,
            max_iters,
            trace,
            out,
        } => {
            let model = DetectionModel::read(instance)?;
            let alpha = Alpha::new(target.alpha)?;
            let covers = CoverSummary::compute(&model, CoverMode::Exact)?;
            let outcome = refine_with(
                &model,
                alpha,
                target.b2,
                cli.tol,
                ColgenOptions { max_iters: *max_iters },
                covers,
            )?;
            if let Some(path) = trace {
                fs::write(path, trace_csv(&outcome))?;
            }
            let selected = outcome
                .selected()
                .ok_or_else(|| Error::Numerical("refinement selected no detector count".into()))?;
            if let Some(dir) = &out.out_dir {
                write_strategy(dir, "sigma1.json", &selected.sigma1.to_file(&model))?;
            }
            Ok(refine_json(&model, &outcome))
        }
        Command::SolveExact { instance, b1, b2, out } => {
            let model = DetectionModel::read(instance)?;
            let ne = solve_exact_ne(&model, GameParams::new(*b1, *b2))?;
            if let Some(dir) = &out.out_dir {
                write_strategy(dir, "sigma1.json", &ne.sigma1.to_file(&model))?;
                write_strategy(dir, "sigma2.json", &ne.sigma2.to_file(&model))?;
            }
            exact_json(&model, &ne)
        }
        Command::Eval { instance, sigma1, sigma2 } => {
            let model = DetectionModel::read(instance)?;
            let s1 = MixedStrategy::from_file(&model, &StrategyFile::read(sigma1)?)?;
            let s2 = MixedStrategy::from_file(&model, &StrategyFile::read(sigma2)?)?;
            let covers = CoverSummary::compute(&model, CoverMode::Exact)?;
            let report = evaluate_profile(&model, &s1, &s2, covers.n_star, covers.m_star)?;
            Ok(eval_json(&report, &covers))
        }
        Command::Decompose {
            marginals,
            b2,
            instance,
            out,
        } => {
            let (ids, rho) = read_marginals(marginals, instance.as_deref())?;
            let total: f64 = rho.iter().sum();
            // single-attack marginals are scaled up to the budget
            let target = if *b2 > 1 && (total - 1.0).abs() <= 1e-9 {
                MarginalTarget::scaled(&rho, *b2)?
            } else {
                MarginalTarget::new(rho, *b2)?
            };
            let sigma2 = decompose(&target)?;
            let file = StrategyFile {
                side: sigma2.side(),
                budget: sigma2.budget(),
                support: sigma2
                    .iter()
                    .map(|(t, &p)| StrategyEntry {
                        action: t.iter().map(|e| ids[e].clone()).collect(),
                        prob: p,
                    })
                    .collect(),
            };
            let marg = sigma2.marginal_vector(ids.len());
            let max_error = marg
                .iter()
                .zip(&target.rho)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if let Some(dir) = &out.out_dir {
                write_strategy(dir, "sigma2.json", &file)?;
            }
            Ok(json!({ "b2": b2, "max_marginal_error": max_error, "strategy": file }))
        }
        Command::Gen {
            family,
            nodes,
            components,
            mean_size,
            out,
        } => {
            let config = GenConfig {
                node_count: *nodes,
                component_count: *components,
                mean_set_size: *mean_size,
                seed: cli.seed,
                family: *family,
            };
            let model = generate(&config)?;
            let instance = model.to_instance();
            match out {
                Some(path) => {
                    fs::write(path, instance.to_json())?;
                    Ok(json!({
                        "config": config,
                        "nodes": model.node_count(),
                        "components": model.component_count(),
                        "path": path,
                    }))
                }
                None => Ok(json!({ "config": config, "instance": instance })),
            }
        }
    }
}

fn write_strategy(dir: &Path, name: &str, file: &StrategyFile) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(file)?;
    text.push('\n');
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn read_marginals(path: &Path, instance: Option<&Path>) -> Result<(Vec<String>, Vec<f64>)> {
    let value: Value = serde_json::from_str(&fs::read_to_string(path)?)?;
    let number = |v: &Value| {
        v.as_f64()
            .ok_or_else(|| Error::InvalidTarget(format!("marginal `{v}` is not a number")))
    };
    let (ids, rho) = match value {
        Value::Array(items) => {
            let rho = items.iter().map(number).collect::<Result<Vec<_>>>()?;
            let ids = (1..=rho.len()).map(|e| format!("e{e}")).collect();
            (ids, rho)
        }
        Value::Object(map) => {
            let mut ids = Vec::with_capacity(map.len());
            let mut rho = Vec::with_capacity(map.len());
            for (k, v) in &map {
                ids.push(k.clone());
                rho.push(number(v)?);
            }
            (ids, rho)
        }
        other => {
            return Err(Error::InvalidTarget(format!(
                "expected an array or an object of marginals, got {other}"
            )))
        }
    };
    let Some(instance) = instance else {
        return Ok((ids, rho));
    };
    // reorder onto the instance's components; missing ids get marginal 0
    let model = DetectionModel::read(instance)?;
    let mut full = vec![0.0; model.component_count()];
    for (id, r) in ids.iter().zip(rho) {
        let pos = model.component_set(&[id])?.as_slice()[0];
        full[pos] = r;
    }
    Ok((model.components().to_vec(), full))
}
