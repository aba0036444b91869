use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::driver::EstimatorKind;
use crate::error::{GpbaError, Result};
use crate::oracles::{BermudanSetup, TestFunction};
use crate::policies::{PolicyKind, PolicySpec};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "GPBA_OUTPUT_DIR";

/// What is being searched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Problem {
    Synthetic { func: TestFunction },
    Finance(BermudanSetup),
}

impl Problem {
    pub fn name(&self) -> String {
        match self {
            Problem::Synthetic { func } => func.to_string(),
            Problem::Finance(_) => "bermudan-put".into(),
        }
    }
}

/// A grid of schemes (policy × estimator × batch size) replicated `reps` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub policies: Vec<PolicyKind>,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorKind>,
    pub batch_sizes: Vec<u32>,
    pub budget: u64,
    #[serde(default = "default_reps")]
    pub reps: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub preavg: u32,
    #[serde(default = "default_alpha")]
    pub alpha_ci: f64,
    #[serde(default = "default_quantiles")]
    pub quantiles: Vec<f64>,
    #[serde(default = "two")]
    pub m_candidates: usize,
    #[serde(default = "default_tpo_alphas")]
    pub tpo_alphas: Vec<f64>,
    #[serde(default = "default_grid")]
    pub grid_size: usize,
    /// Empty means ten log-spaced checkpoints per scheme.
    #[serde(default)]
    pub checkpoints: Vec<u64>,
    /// Worker threads; 0 uses every available core.
    #[serde(default)]
    pub threads: usize,
    /// Only response signs reach the estimators.
    #[serde(default)]
    pub sign_only: bool,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_estimators() -> Vec<EstimatorKind> {
    vec![EstimatorKind::Clt]
}
fn default_reps() -> u32 {
    100
}
fn one() -> u32 {
    1
}
fn two() -> usize {
    2
}
fn default_alpha() -> f64 {
    0.05
}
fn default_quantiles() -> Vec<f64> {
    vec![0.25, 0.75]
}
fn default_tpo_alphas() -> Vec<f64> {
    vec![0.05]
}
fn default_grid() -> usize {
    1001
}

impl ExperimentConfig {
    /// Minimal configuration for a synthetic benchmark.
    pub fn synthetic(func: TestFunction, policies: Vec<PolicyKind>, estimators: Vec<EstimatorKind>, batch_sizes: Vec<u32>, budget: u64) -> Self {
        let value = serde_json::json!({
            "problem": { "kind": "synthetic", "func": func },
            "policies": policies,
            "estimators": estimators,
            "batch_sizes": batch_sizes,
            "budget": budget,
        });
        serde_json::from_value(value).expect("defaults fill every other field")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| GpbaError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(GpbaError::Config("reps must be at least 1".into()));
        }
        if self.policies.is_empty() || self.batch_sizes.is_empty() || self.estimators.is_empty() {
            return Err(GpbaError::Config("policies, estimators and batch_sizes must be non-empty".into()));
        }
        if self.budget == 0 {
            return Err(GpbaError::Config("budget must be positive".into()));
        }
        if self.policies.contains(&PolicyKind::Tpo) && self.tpo_alphas.is_empty() {
            return Err(GpbaError::Config("tpo_alphas must be non-empty".into()));
        }
        Ok(())
    }

    pub fn policy_spec(&self, kind: PolicyKind, tpo_alpha: f64) -> PolicySpec {
        PolicySpec {
            kind,
            quantiles: self.quantiles.clone(),
            m_candidates: self.m_candidates,
            tpo_alpha,
            grid_size: self.grid_size,
        }
    }

    /// Configured output directory, else `$GPBA_OUTPUT_DIR`, else `gpba-output`.
    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("gpba-output"))
    }
}
