//! Design quality: how good are the query locations chosen by a scheme,
//! judged by the exact-accuracy posterior they would have produced?

use super::config::{ExperimentConfig, Problem};
use super::experiment::{replicate, schemes, summarize, with_pool, OracleFactory, RepRecord, ResultTable, Scheme};
use crate::driver::{replay_exact, EstimatorKind};
use crate::error::{GpbaError, Result};
use crate::policies::PolicyKind;

const BASELINES: [PolicyKind; 3] = [PolicyKind::TrueIds, PolicyKind::Median, PolicyKind::Uniform];

/// Replays every non-baseline scheme's design through the exact-accuracy
/// update, and runs the three known-accuracy baselines at each batch size.
///
/// Replayed rows carry the scheme name prefixed with `design:`.
pub fn run_design_quality(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    if matches!(cfg.problem, Problem::Finance(_)) {
        return Err(GpbaError::Config("design quality needs the exact accuracy; unavailable for the finance oracle".into()));
    }
    let mut all = schemes(cfg)?;
    all.retain(|s| !s.policy.kind.is_baseline());
    for &k in &cfg.batch_sizes {
        for kind in BASELINES {
            all.push(Scheme { policy: cfg.policy_spec(kind, 0.05), estimator: EstimatorKind::Exact, batch_k: k });
        }
    }
    let factory = OracleFactory::new(cfg)?;
    with_pool(cfg.threads, || {
        let mut table = ResultTable::default();
        for scheme in &all {
            let runs = replicate(cfg, &factory, scheme)?;
            let baseline = scheme.policy.kind.is_baseline();
            let label = if baseline { scheme.name() } else { format!("design:{}", scheme.name()) };
            let mut records = Vec::new();
            for (rep, (oracle, out)) in runs.iter().enumerate() {
                let metrics = if baseline {
                    out.metrics.clone()
                } else {
                    let checkpoints = out.metrics.iter().map(|m| m.checkpoint).collect();
                    replay_exact(&out.trace, oracle.as_ref(), checkpoints, cfg.alpha_ci)?.1
                };
                records.extend(metrics.iter().map(|m| RepRecord::new(scheme, &label, rep as u32, m)));
            }
            table.summary.extend(summarize(&records));
            table.records.extend(records);
        }
        Ok(table)
    })?
}
