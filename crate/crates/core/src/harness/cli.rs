//! Command-line front end. Every flag overrides the matching key of an
//! optional JSON config file.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use super::config::{ExperimentConfig, Problem, OUTPUT_DIR_ENV};
use super::design::run_design_quality;
use super::experiment::{run_experiment, OracleFactory, ResultTable};
use super::output::write_records;
use super::tpo_table::{tpo_table, write_tpo_table};
use crate::driver::EstimatorKind;
use crate::error::{GpbaError, Result};
use crate::oracles::{write_boundary_csv, TestFunction};
use crate::policies::PolicyKind;

#[derive(Debug, Parser)]
#[command(name = "gpba", version, about = "Probabilistic bisection experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte-Carlo study on a synthetic benchmark.
    Synthetic(SyntheticArgs),
    /// Monte-Carlo study of the Bermudan put exercise boundary.
    Finance(FinanceArgs),
    /// Mean hitting times of the power-one test.
    TpoTable(TpoArgs),
    /// Exact-accuracy replay of chosen designs, plus known-accuracy baselines.
    DesignQuality(SyntheticArgs),
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "policy", value_delimiter = ',')]
    pub policies: Vec<PolicyKind>,
    #[arg(long = "estimator", value_delimiter = ',')]
    pub estimators: Vec<EstimatorKind>,
    #[arg(long = "batch", value_delimiter = ',')]
    pub batch_sizes: Vec<u32>,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub reps: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pre-averaging group size.
    #[arg(long)]
    pub preavg: Option<u32>,
    #[arg(long)]
    pub alpha_ci: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub quantiles: Vec<f64>,
    /// Candidates per iteration for rand-ids.
    #[arg(long)]
    pub candidates: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub tpo_alpha: Vec<f64>,
    /// Grid size for true-ids.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Vec<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Hide response magnitudes from the estimators.
    #[arg(long)]
    pub sign_only: bool,
    /// Output directory.
    #[arg(long, env = OUTPUT_DIR_ENV)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SyntheticArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub func: Option<TestFunction>,
}

#[derive(Debug, Args)]
pub struct FinanceArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub vol: Option<f64>,
    #[arg(long)]
    pub dates: Option<usize>,
    /// Exercise date whose boundary is sought (1-based).
    #[arg(long)]
    pub eval_date: Option<usize>,
    #[arg(long)]
    pub lattice_steps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TpoArgs {
    #[arg(long = "p", value_delimiter = ',', default_values_t = [0.52, 0.55, 0.6, 0.7])]
    pub ps: Vec<f64>,
    #[arg(long = "alpha", value_delimiter = ',', default_values_t = [0.05, 0.1, 0.2, 0.4])]
    pub alphas: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub reps: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, env = OUTPUT_DIR_ENV)]
    pub out: Option<PathBuf>,
}

fn set<T: serde::Serialize>(map: &mut Map<String, Value>, key: &str, value: Option<T>) {
    if let Some(v) = value {
        map.insert(key.into(), json!(v));
    }
}

fn set_list<T: serde::Serialize>(map: &mut Map<String, Value>, key: &str, values: &[T]) {
    if !values.is_empty() {
        map.insert(key.into(), json!(values));
    }
}

fn base_map(grid: &GridArgs) -> Result<Map<String, Value>> {
    let mut map = match &grid.config {
        Some(path) => match serde_json::from_str(&std::fs::read_to_string(path)?)
            .map_err(|e| GpbaError::Parse(format!("{}: {e}", path.display())))?
        {
            Value::Object(m) => m,
            _ => return Err(GpbaError::Parse("config file must hold a JSON object".into())),
        },
        None => Map::new(),
    };
    set_list(&mut map, "policies", &grid.policies);
    set_list(&mut map, "estimators", &grid.estimators);
    set_list(&mut map, "batch_sizes", &grid.batch_sizes);
    set(&mut map, "budget", grid.budget);
    set(&mut map, "reps", grid.reps);
    set(&mut map, "seed", grid.seed);
    set(&mut map, "preavg", grid.preavg);
    set(&mut map, "alpha_ci", grid.alpha_ci);
    set_list(&mut map, "quantiles", &grid.quantiles);
    set(&mut map, "m_candidates", grid.candidates);
    set_list(&mut map, "tpo_alphas", &grid.tpo_alpha);
    set(&mut map, "grid_size", grid.grid);
    set_list(&mut map, "checkpoints", &grid.checkpoints);
    set(&mut map, "threads", grid.threads);
    if grid.sign_only {
        map.insert("sign_only".into(), json!(true));
    }
    set(&mut map, "output_dir", grid.out.clone());
    Ok(map)
}

fn problem_map<'a>(map: &'a mut Map<String, Value>, kind: &str) -> Result<&'a mut Map<String, Value>> {
    let entry = map.entry("problem").or_insert_with(|| json!({ "kind": kind }));
    let Value::Object(problem) = entry else {
        return Err(GpbaError::Parse("problem must be a JSON object".into()));
    };
    match problem.get("kind").and_then(Value::as_str) {
        Some(k) if k == kind => Ok(problem),
        Some(other) => Err(GpbaError::Config(format!("config describes a {other} problem, not {kind}"))),
        None => {
            problem.insert("kind".into(), json!(kind));
            Ok(problem)
        }
    }
}

fn finish(map: Map<String, Value>) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig =
        serde_json::from_value(Value::Object(map)).map_err(|e| GpbaError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Builds a synthetic-benchmark config; the function defaults to `h1`.
pub fn synthetic_config(args: &SyntheticArgs) -> Result<ExperimentConfig> {
    let mut map = base_map(&args.grid)?;
    let problem = problem_map(&mut map, "synthetic")?;
    if let Some(func) = args.func {
        problem.insert("func".into(), json!(func));
    }
    problem.entry("func").or_insert(json!(TestFunction::H1));
    finish(map)
}

pub fn finance_config(args: &FinanceArgs) -> Result<ExperimentConfig> {
    let mut map = base_map(&args.grid)?;
    let problem = problem_map(&mut map, "finance")?;
    set(problem, "volatility", args.vol);
    set(problem, "n_dates", args.dates);
    set(problem, "eval_date", args.eval_date);
    set(problem, "lattice_steps", args.lattice_steps);
    finish(map)
}

fn describe(table: &ResultTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<32} {:>8} {:>12} {:>12} {:>9}", "scheme", "T", "residual", "ci_len", "coverage");
    let mut last: Vec<_> = Vec::new();
    for s in &table.summary {
        if table.summary.iter().filter(|o| o.scheme == s.scheme).all(|o| o.t <= s.t) {
            last.push(s);
        }
    }
    for s in last {
        let fmt_opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"));
        let _ = writeln!(
            out,
            "{:<32} {:>8} {:>12} {:>12.6} {:>9}",
            s.scheme,
            s.t,
            fmt_opt(s.mean_residual),
            s.mean_ci_len,
            s.coverage.map_or_else(|| "-".to_string(), |c| format!("{:.1}%", 100.0 * c)),
        );
    }
    out
}

/// Executes a parsed command line; returns the text report.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Synthetic(args) => {
            let cfg = synthetic_config(args)?;
            let table = run_experiment(&cfg)?;
            let (csv, json) = write_records(&table, &cfg.output_dir(), &format!("synthetic-{}", cfg.problem.name()))?;
            Ok(format!("{}wrote {} and {}\n", describe(&table), csv.display(), json.display()))
        }
        Command::DesignQuality(args) => {
            let cfg = synthetic_config(args)?;
            let table = run_design_quality(&cfg)?;
            let (csv, json) = write_records(&table, &cfg.output_dir(), &format!("design-{}", cfg.problem.name()))?;
            Ok(format!("{}wrote {} and {}\n", describe(&table), csv.display(), json.display()))
        }
        Command::Finance(args) => {
            let cfg = finance_config(args)?;
            let dir = cfg.output_dir();
            let factory = OracleFactory::new(&cfg)?;
            std::fs::create_dir_all(&dir)?;
            let boundary_path = dir.join("boundary.csv");
            write_boundary_csv(factory.boundary().expect("finance problem"), &boundary_path)?;
            let Problem::Finance(setup) = &cfg.problem else { unreachable!("finance config") };
            let root = factory.boundary().expect("finance problem").at(setup.eval_date);
            let table = run_experiment(&cfg)?;
            let (csv, json) = write_records(&table, &dir, "finance")?;
            Ok(format!(
                "lattice boundary at t = {}: {root:.4}\n{}wrote {}, {} and {}\n",
                setup.eval_time(),
                describe(&table),
                csv.display(),
                json.display(),
                boundary_path.display()
            ))
        }
        Command::TpoTable(args) => {
            let cells = tpo_table(&args.ps, &args.alphas, args.reps, args.seed, args.threads)?;
            let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("gpba-output"));
            let path = write_tpo_table(&cells, &dir)?;
            let mut out = format!("{:>6} {:>6} {:>10} {:>10}\n", "p", "alpha", "mean K", "sd K");
            for c in &cells {
                let _ = writeln!(out, "{:>6} {:>6} {:>10.1} {:>10.1}", c.p, c.alpha, c.mean_k, c.sd_k);
            }
            let _ = writeln!(out, "wrote {}", path.display());
            Ok(out)
        }
    }
}
