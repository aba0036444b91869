use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Problem};
use crate::driver::{run, EstimatorKind, MetricsRecord, RunConfig, RunOutput};
use crate::error::{GpbaError, Result};
use crate::oracles::{BermudanPut, BoundaryTable, Oracle, SignOnly, SyntheticOracle};
use crate::policies::{PolicyKind, PolicySpec};
use crate::seed::{derive_seed, ORACLE_STREAM, POLICY_STREAM};

/// One `(policy, estimator, batch size)` combination.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheme {
    pub policy: PolicySpec,
    pub estimator: EstimatorKind,
    /// Zero for the adaptive power-one policy.
    pub batch_k: u32,
}

impl Scheme {
    pub fn name(&self) -> String {
        match self.policy.kind {
            PolicyKind::Tpo => format!("tpo[alpha={}]:{}", self.policy.tpo_alpha, self.estimator),
            kind => format!("{kind}:{}:{}", self.estimator, self.batch_k),
        }
    }

    pub fn run_config(&self, cfg: &ExperimentConfig, seed: u64) -> RunConfig {
        RunConfig {
            policy: self.policy.clone(),
            estimator: self.estimator,
            batch_k: self.batch_k.max(1),
            budget_t: cfg.budget,
            preavg_a: cfg.preavg,
            alpha_ci: cfg.alpha_ci,
            checkpoints: cfg.checkpoints.clone(),
            seed,
        }
    }
}

/// Expands the configured grid, dropping duplicates created by policies
/// that ignore the estimator or batch size.
pub fn schemes(cfg: &ExperimentConfig) -> Result<Vec<Scheme>> {
    let finance = matches!(cfg.problem, Problem::Finance(_));
    let mut out: Vec<Scheme> = Vec::new();
    let mut push = |s: Scheme| {
        if !out.contains(&s) {
            out.push(s);
        }
    };
    for &kind in &cfg.policies {
        if kind == PolicyKind::Tpo {
            if cfg.sign_only {
                return Err(GpbaError::Config("the power-one policy needs functional responses".into()));
            }
            for &alpha in &cfg.tpo_alphas {
                push(Scheme { policy: cfg.policy_spec(kind, alpha), estimator: EstimatorKind::Clt, batch_k: 0 });
            }
            continue;
        }
        for &k in &cfg.batch_sizes {
            if kind.is_baseline() {
                push(Scheme { policy: cfg.policy_spec(kind, 0.05), estimator: EstimatorKind::Exact, batch_k: k });
                continue;
            }
            for &est in &cfg.estimators {
                push(Scheme { policy: cfg.policy_spec(kind, 0.05), estimator: est, batch_k: k });
            }
        }
    }
    for s in &out {
        if s.estimator == EstimatorKind::Clt && cfg.sign_only {
            return Err(GpbaError::Config(format!("{}: functional estimator with a sign-only oracle", s.name())));
        }
        if s.estimator == EstimatorKind::Exact && finance {
            return Err(GpbaError::Config(format!("{}: the exact accuracy is unknown for the finance oracle", s.name())));
        }
        s.policy.validate()?;
    }
    Ok(out)
}

/// Builds the oracles of an experiment; the lattice boundary is computed once.
#[derive(Debug, Clone)]
pub struct OracleFactory {
    problem: Problem,
    sign_only: bool,
    boundary: Option<Arc<BoundaryTable>>,
}

impl OracleFactory {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let boundary = match &cfg.problem {
            Problem::Finance(setup) => Some(Arc::new(setup.boundary()?)),
            Problem::Synthetic { .. } => None,
        };
        Ok(Self { problem: cfg.problem.clone(), sign_only: cfg.sign_only, boundary })
    }

    pub fn boundary(&self) -> Option<&BoundaryTable> {
        self.boundary.as_deref()
    }

    pub fn make(&self, seed: u64) -> Result<Box<dyn Oracle>> {
        let oracle: Box<dyn Oracle> = match &self.problem {
            Problem::Synthetic { func } => Box::new(SyntheticOracle::new(*func, seed)),
            Problem::Finance(setup) => Box::new(BermudanPut::new(
                setup.clone(),
                Arc::clone(self.boundary.as_ref().expect("built with the factory")),
                seed,
            )?),
        };
        Ok(if self.sign_only { Box::new(SignOnly(oracle)) } else { oracle })
    }
}

/// Per-replication seeds: one for the oracle's noise, one for the policy.
pub fn replication_seeds(base: u64, rep: u32) -> (u64, u64) {
    let rep_seed = derive_seed(base, u64::from(rep));
    (derive_seed(rep_seed, ORACLE_STREAM), derive_seed(rep_seed, POLICY_STREAM))
}

/// One row of the output table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub scheme: String,
    pub policy: String,
    pub estimator: String,
    #[serde(rename = "K")]
    pub k: u32,
    /// Checkpoint budget.
    #[serde(rename = "T")]
    pub t: u64,
    pub rep: u32,
    pub budget_used: u64,
    pub root_est: f64,
    pub residual: Option<f64>,
    pub ci_len: f64,
    pub covered: Option<bool>,
}

impl RepRecord {
    pub fn new(scheme: &Scheme, label: &str, rep: u32, m: &MetricsRecord) -> Self {
        Self {
            scheme: label.to_string(),
            policy: scheme.policy.kind.to_string(),
            estimator: scheme.estimator.to_string(),
            k: scheme.batch_k,
            t: m.checkpoint,
            rep,
            budget_used: m.budget_used,
            root_est: m.root_estimate,
            residual: m.residual,
            ci_len: m.ci_length,
            covered: m.covered,
        }
    }
}

/// Monte-Carlo summary of one scheme at one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSummary {
    pub scheme: String,
    pub policy: String,
    pub estimator: String,
    #[serde(rename = "K")]
    pub k: u32,
    #[serde(rename = "T")]
    pub t: u64,
    pub reps: u32,
    pub mean_residual: Option<f64>,
    pub se_residual: Option<f64>,
    pub median_residual: Option<f64>,
    pub mean_ci_len: f64,
    pub coverage: Option<f64>,
    pub mean_budget_used: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub records: Vec<RepRecord>,
    pub summary: Vec<SchemeSummary>,
}

impl ResultTable {
    pub fn find(&self, scheme: &str, t: u64) -> Option<&SchemeSummary> {
        self.summary.iter().find(|s| s.scheme == scheme && s.t == t)
    }

    /// Summaries of one scheme in checkpoint order.
    pub fn curve(&self, scheme: &str) -> Vec<&SchemeSummary> {
        self.summary.iter().filter(|s| s.scheme == scheme).collect()
    }

    pub fn extend(&mut self, other: ResultTable) {
        self.records.extend(other.records);
        self.summary.extend(other.summary);
    }
}

/// Aggregates records of one scheme (all replications) checkpoint by checkpoint.
pub fn summarize(records: &[RepRecord]) -> Vec<SchemeSummary> {
    let mut checkpoints: Vec<u64> = records.iter().map(|r| r.t).collect();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    checkpoints
        .into_iter()
        .map(|t| {
            let rows: Vec<&RepRecord> = records.iter().filter(|r| r.t == t).collect();
            let n = rows.len() as f64;
            let mut residuals: Vec<f64> = rows.iter().filter_map(|r| r.residual).collect();
            let (mean_residual, se_residual, median_residual) = if residuals.len() == rows.len() && !rows.is_empty() {
                let mean = residuals.iter().sum::<f64>() / n;
                let var = if rows.len() > 1 {
                    residuals.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)
                } else {
                    0.0
                };
                residuals.sort_by(f64::total_cmp);
                let mid = residuals.len() / 2;
                let median = if residuals.len() % 2 == 1 {
                    residuals[mid]
                } else {
                    0.5 * (residuals[mid - 1] + residuals[mid])
                };
                (Some(mean), Some((var / n).sqrt()), Some(median))
            } else {
                (None, None, None)
            };
            let covered: Vec<bool> = rows.iter().filter_map(|r| r.covered).collect();
            let first = rows[0];
            SchemeSummary {
                scheme: first.scheme.clone(),
                policy: first.policy.clone(),
                estimator: first.estimator.clone(),
                k: first.k,
                t,
                reps: rows.len() as u32,
                mean_residual,
                se_residual,
                median_residual,
                mean_ci_len: rows.iter().map(|r| r.ci_len).sum::<f64>() / n,
                coverage: (covered.len() == rows.len())
                    .then(|| covered.iter().filter(|&&c| c).count() as f64 / n),
                mean_budget_used: rows.iter().map(|r| r.budget_used as f64).sum::<f64>() / n,
            }
        })
        .collect()
}

/// Runs `f` inside a pool of `threads` workers (0 = all cores).
pub fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| GpbaError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs every replication of one scheme; results are in replication order
/// whatever the degree of parallelism.
pub fn replicate(cfg: &ExperimentConfig, factory: &OracleFactory, scheme: &Scheme) -> Result<Vec<(Box<dyn Oracle>, RunOutput)>> {
    (0..cfg.reps)
        .into_par_iter()
        .map(|rep| {
            let (oracle_seed, policy_seed) = replication_seeds(cfg.seed, rep);
            let mut oracle = factory.make(oracle_seed)?;
            let out = run(&scheme.run_config(cfg, policy_seed), &mut oracle)?;
            Ok((oracle, out))
        })
        .collect()
}

/// Monte-Carlo replication of every scheme in the grid.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let schemes = schemes(cfg)?;
    let factory = OracleFactory::new(cfg)?;
    with_pool(cfg.threads, || {
        let mut table = ResultTable::default();
        for scheme in &schemes {
            let label = scheme.name();
            let runs = replicate(cfg, &factory, scheme)?;
            let records: Vec<RepRecord> = runs
                .iter()
                .enumerate()
                .flat_map(|(rep, (_, out))| out.metrics.iter().map(move |m| (rep, m)))
                .map(|(rep, m)| RepRecord::new(scheme, &label, rep as u32, m))
                .collect();
            table.summary.extend(summarize(&records));
            table.records.extend(records);
        }
        Ok(table)
    })?
}
