//! One search run: propose, query, estimate, update, until the call budget
//! is spent.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::density::PiecewiseDensity;
use crate::error::{GpbaError, Result};
use crate::estimators::{
    boost_majority, clamp_estimate, clt_prob, empirical_majority, BatchStats, PosteriorCache,
};
use crate::oracles::{preaveraged_batch, Oracle};
use crate::policies::{
    baseline_next, ids_candidates, ids_select, rand_q_next, syst_q_next, tpo_query, PolicyKind,
    PolicySpec,
};
use crate::updating::{step_update, UpdateSignal};

/// How the oracle accuracy is estimated from a batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    /// Majority proportion.
    Bar,
    /// Posterior mode given the majority proportion.
    Mode,
    /// Posterior median.
    Median,
    /// Posterior mean.
    Mean,
    /// Probability that the majority vote is correct.
    Boost,
    /// Normal approximation for the sign of the batch mean.
    Clt,
    /// The oracle's exact accuracy (known-accuracy baselines only).
    Exact,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 7] = [
        EstimatorKind::Bar,
        EstimatorKind::Mode,
        EstimatorKind::Median,
        EstimatorKind::Mean,
        EstimatorKind::Boost,
        EstimatorKind::Clt,
        EstimatorKind::Exact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Bar => "bar",
            EstimatorKind::Mode => "mode",
            EstimatorKind::Median => "median",
            EstimatorKind::Mean => "mean",
            EstimatorKind::Boost => "boost",
            EstimatorKind::Clt => "clt",
            EstimatorKind::Exact => "exact",
        }
    }

    pub fn needs_functional(self) -> bool {
        self == EstimatorKind::Clt
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = GpbaError;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| GpbaError::Parse(format!("unknown estimator {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub policy: PolicySpec,
    pub estimator: EstimatorKind,
    pub batch_k: u32,
    pub budget_t: u64,
    /// Pre-averaging group size; must divide `batch_k`.
    pub preavg_a: u32,
    pub alpha_ci: f64,
    /// Budgets at which to record metrics; empty means [`default_checkpoints`].
    pub checkpoints: Vec<u64>,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(policy: PolicySpec, estimator: EstimatorKind, batch_k: u32, budget_t: u64) -> Self {
        Self {
            policy,
            estimator,
            batch_k,
            budget_t,
            preavg_a: 1,
            alpha_ci: 0.05,
            checkpoints: Vec::new(),
            seed: 0,
        }
    }

    /// The estimator actually used: baselines always use the exact accuracy
    /// and the power-one policy always uses the functional estimate.
    pub fn effective_estimator(&self) -> EstimatorKind {
        match self.policy.kind {
            k if k.is_baseline() => EstimatorKind::Exact,
            PolicyKind::Tpo => EstimatorKind::Clt,
            _ => self.estimator,
        }
    }

    /// Oracle calls per macro-iteration (1 for the adaptive power-one policy).
    pub fn batch_cost(&self) -> u64 {
        match self.policy.kind {
            PolicyKind::Tpo => 1,
            _ => u64::from(self.batch_k) * self.policy.candidates() as u64,
        }
    }

    pub fn checkpoints(&self) -> Vec<u64> {
        if self.checkpoints.is_empty() {
            default_checkpoints(self.batch_cost(), self.budget_t)
        } else {
            let mut c = self.checkpoints.clone();
            c.sort_unstable();
            c.dedup();
            c
        }
    }

    pub fn validate<O: Oracle + ?Sized>(&self, oracle: &O) -> Result<()> {
        self.policy.validate()?;
        let (lo, hi) = oracle.domain();
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(GpbaError::Config(format!("oracle domain [{lo}, {hi}] is not a bounded interval")));
        }
        if !(self.alpha_ci > 0.0 && self.alpha_ci < 1.0) {
            return Err(GpbaError::InvalidProbability(self.alpha_ci));
        }
        let estimator = self.effective_estimator();
        if self.policy.kind == PolicyKind::Tpo {
            if !oracle.has_functional() || oracle.noise_scale(0.5 * (lo + hi)).is_none() {
                return Err(GpbaError::Config(
                    "the power-one policy needs functional responses with a known noise scale".into(),
                ));
            }
            if self.budget_t == 0 {
                return Err(GpbaError::Config("budget must be positive".into()));
            }
            return Ok(());
        }
        let min_k = if estimator == EstimatorKind::Exact { 1 } else { 2 };
        if self.batch_k < min_k {
            return Err(GpbaError::UnsupportedBatch { k: self.batch_k, min: min_k });
        }
        if self.preavg_a == 0 || !self.batch_k.is_multiple_of(self.preavg_a) {
            return Err(GpbaError::Config(format!(
                "pre-averaging group {} must divide batch size {}",
                self.preavg_a, self.batch_k
            )));
        }
        if self.budget_t < self.batch_cost() {
            return Err(GpbaError::Config(format!(
                "budget {} is smaller than one macro-iteration ({} calls)",
                self.budget_t,
                self.batch_cost()
            )));
        }
        if estimator.needs_functional() && !oracle.has_functional() {
            return Err(GpbaError::Config(format!("estimator {estimator} needs functional responses")));
        }
        if estimator == EstimatorKind::Exact && oracle.true_p(0.5 * (lo + hi)).is_none() {
            return Err(GpbaError::Config("exact accuracy is not available for this oracle".into()));
        }
        Ok(())
    }
}

/// Ten log-spaced budgets from one batch to `budget`, rounded down to whole
/// batches; the last is always `budget` itself.
pub fn default_checkpoints(batch_cost: u64, budget: u64) -> Vec<u64> {
    let cost = batch_cost.max(1);
    if budget <= cost {
        return vec![budget];
    }
    let (a, b) = ((cost as f64).ln(), (budget as f64).ln());
    let mut out: Vec<u64> = (0..10)
        .map(|i| {
            let v = (a + (b - a) * i as f64 / 9.0).exp().round() as u64;
            (v / cost * cost).max(cost)
        })
        .collect();
    *out.last_mut().expect("ten entries") = budget;
    out.dedup();
    out
}

/// State summary at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub checkpoint: u64,
    pub budget_used: u64,
    pub n_macro: usize,
    pub root_estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub ci_length: f64,
    /// `|root_estimate − root|`, when the root is known.
    pub residual: Option<f64>,
    pub covered: Option<bool>,
}

/// Root estimate, residual, interval length and coverage of a density.
pub fn metrics_snapshot(f: &PiecewiseDensity, root: Option<f64>, alpha: f64) -> Result<MetricsRecord> {
    let root_estimate = f.median();
    let (ci_lo, ci_hi) = f.credible_interval(alpha)?;
    Ok(MetricsRecord {
        checkpoint: 0,
        budget_used: 0,
        n_macro: 0,
        root_estimate,
        ci_lo,
        ci_hi,
        ci_length: ci_hi - ci_lo,
        residual: root.map(|x| (root_estimate - x).abs()),
        covered: root.map(|x| ci_lo <= x && x <= ci_hi),
    })
}

/// One macro-iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub n: usize,
    pub x: f64,
    pub n_right: u32,
    pub n_signs: u32,
    /// Raw calls in the batch that drove the update.
    pub k_used: u32,
    /// All calls spent in this iteration, including unused candidates.
    pub calls: u64,
    /// Cumulative calls after this iteration.
    pub budget_used: u64,
    pub accuracy: f64,
    pub root_estimate: f64,
}

pub const TRACE_HEADER: &str = "# n x n_right n_signs k_used calls budget_used accuracy root_estimate";

/// Whitespace-separated trace, one line per macro-iteration after a `#` header.
pub fn write_trace<W: Write>(trace: &[TraceRecord], mut out: W) -> Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in trace {
        writeln!(
            out,
            "{} {:.17e} {} {} {} {} {} {:.17e} {:.17e}",
            r.n, r.x, r.n_right, r.n_signs, r.k_used, r.calls, r.budget_used, r.accuracy, r.root_estimate
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub density: PiecewiseDensity,
    pub metrics: Vec<MetricsRecord>,
    pub trace: Vec<TraceRecord>,
    pub budget_used: u64,
}

/// Collects checkpoint metrics as the state evolves.
struct Recorder {
    pending: std::vec::IntoIter<u64>,
    next: Option<u64>,
    root: Option<f64>,
    alpha: f64,
    metrics: Vec<MetricsRecord>,
}

impl Recorder {
    fn new(checkpoints: Vec<u64>, root: Option<f64>, alpha: f64) -> Self {
        let mut pending = checkpoints.into_iter();
        let next = pending.next();
        Self { pending, next, root, alpha, metrics: Vec::new() }
    }

    /// Records every checkpoint below `limit` from the current state.
    fn before(&mut self, limit: u64, f: &PiecewiseDensity, used: u64, n: usize) -> Result<()> {
        while let Some(c) = self.next.filter(|&c| c < limit) {
            let mut m = metrics_snapshot(f, self.root, self.alpha)?;
            m.checkpoint = c;
            m.budget_used = used;
            m.n_macro = n;
            self.metrics.push(m);
            self.next = self.pending.next();
        }
        Ok(())
    }

    fn finish(mut self, f: &PiecewiseDensity, used: u64, n: usize) -> Result<Vec<MetricsRecord>> {
        self.before(u64::MAX, f, used, n)?;
        Ok(self.metrics)
    }
}

/// Keeps an exact accuracy that rounds to one from zeroing half the support.
fn exact_cap(p: f64) -> f64 {
    p.min(1.0 - f64::EPSILON)
}

/// A query point outside the positive-mass region leaves the posterior
/// unchanged, so the update is dropped.
fn apply_or_skip(result: Result<()>) -> Result<()> {
    match result {
        Err(GpbaError::DegenerateUpdate(_)) => Ok(()),
        other => other,
    }
}

/// Turns a batch into an update signal for the given estimator.
pub fn estimate_signal<O: Oracle + ?Sized>(
    kind: EstimatorKind,
    stats: &BatchStats,
    x: f64,
    oracle: &O,
    cache: &mut PosteriorCache,
) -> Result<UpdateSignal> {
    let (n_right, k) = (stats.n_right, stats.n_signs);
    let counts = |accuracy: f64| UpdateSignal::Counts { n_right, k, accuracy };
    let j = stats.minority();
    Ok(match kind {
        EstimatorKind::Bar => counts(clamp_estimate(empirical_majority(stats), k)),
        EstimatorKind::Mode => counts(clamp_estimate(cache.mode(j, k)?, k)),
        EstimatorKind::Median => counts(clamp_estimate(cache.median(j, k)?, k)),
        EstimatorKind::Mean => counts(clamp_estimate(cache.mean(j, k)?, k)),
        EstimatorKind::Boost => UpdateSignal::Boosted {
            direction: stats.majority_direction(),
            accuracy: clamp_estimate(boost_majority(empirical_majority(stats), k), k),
        },
        EstimatorKind::Clt if stats.k < 2 => UpdateSignal::Boosted {
            direction: crate::updating::Direction::from_value(stats.mean().unwrap_or(0.0)),
            accuracy: 0.5,
        },
        EstimatorKind::Clt => {
            let (p, direction) = clt_prob(stats)?;
            UpdateSignal::Boosted { direction, accuracy: clamp_estimate(p, stats.k) }
        }
        EstimatorKind::Exact => counts(exact_cap(
            oracle
                .true_p(x)
                .ok_or_else(|| GpbaError::Config("exact accuracy is not available".into()))?,
        )),
    })
}

/// Runs one search. Dispatches to [`run_tpo_pba`] for the power-one policy.
pub fn run<O: Oracle + ?Sized>(config: &RunConfig, oracle: &mut O) -> Result<RunOutput> {
    match config.policy.kind {
        PolicyKind::Tpo => run_tpo_pba(config, oracle),
        _ => run_gpba(config, oracle),
    }
}

/// Batched search with a fixed batch size.
///
/// A final remainder smaller than one batch is spent as a truncated batch
/// (rounded down to whole pre-averaging groups), except for
/// information-directed policies, which stop instead.
pub fn run_gpba<O: Oracle + ?Sized>(config: &RunConfig, oracle: &mut O) -> Result<RunOutput> {
    config.validate(oracle)?;
    let spec = &config.policy;
    if spec.kind == PolicyKind::Tpo {
        return Err(GpbaError::Config("use run_tpo_pba for the power-one policy".into()));
    }
    let (lo, hi) = oracle.domain();
    let mut f = PiecewiseDensity::uniform(lo, hi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut cache = PosteriorCache::new();
    let estimator = config.effective_estimator();
    let (k_full, a) = (config.batch_k, config.preavg_a);
    let mut recorder = Recorder::new(config.checkpoints(), oracle.true_root(), config.alpha_ci);
    let mut trace = Vec::new();
    let mut used = 0u64;

    loop {
        let remaining = config.budget_t - used;
        let n = trace.len();
        let (x, stats, signal, calls) = if spec.kind.is_ids() {
            let calls = config.batch_cost();
            if remaining < calls {
                break;
            }
            let candidates = ids_candidates(&f, spec, &mut rng)?;
            let mut batches = Vec::with_capacity(candidates.len());
            for &x in &candidates {
                let stats = preaveraged_batch(oracle, x, k_full, a)?;
                let signal = estimate_signal(estimator, &stats, x, oracle, &mut cache)?;
                batches.push((x, stats, signal));
            }
            let scored: Vec<(f64, f64)> = batches.iter().map(|(x, _, s)| (*x, s.accuracy())).collect();
            let (x, stats, signal) = batches.swap_remove(ids_select(&f, &scored)?);
            (x, stats, signal, calls)
        } else {
            let k = (remaining.min(u64::from(k_full)) as u32) / a * a;
            if k == 0 {
                break;
            }
            let x = match spec.kind {
                PolicyKind::SystQ => syst_q_next(&f, spec, n)?,
                PolicyKind::RandQ => rand_q_next(&f, &mut rng),
                _ => baseline_next(&f, spec, oracle, &mut rng)?,
            };
            let stats = preaveraged_batch(oracle, x, k, a)?;
            let signal = estimate_signal(estimator, &stats, x, oracle, &mut cache)?;
            (x, stats, signal, u64::from(k))
        };
        recorder.before(used + calls, &f, used, n)?;
        apply_or_skip(signal.apply(&mut f, x))?;
        used += calls;
        trace.push(TraceRecord {
            n: n + 1,
            x,
            n_right: stats.n_right,
            n_signs: stats.n_signs,
            k_used: stats.k,
            calls,
            budget_used: used,
            accuracy: signal.accuracy(),
            root_estimate: f.median(),
        });
    }
    let metrics = recorder.finish(&f, used, trace.len())?;
    Ok(RunOutput { density: f, metrics, trace, budget_used: used })
}

/// Median sampling with adaptive batches ended by a power-one test, each
/// batch truncated to the remaining budget.
pub fn run_tpo_pba<O: Oracle + ?Sized>(config: &RunConfig, oracle: &mut O) -> Result<RunOutput> {
    config.validate(oracle)?;
    let (lo, hi) = oracle.domain();
    let mut f = PiecewiseDensity::uniform(lo, hi)?;
    let mut recorder = Recorder::new(config.checkpoints(), oracle.true_root(), config.alpha_ci);
    let mut trace = Vec::new();
    let mut used = 0u64;

    while used < config.budget_t {
        let n = trace.len();
        let x = f.nudge_into_support(f.median());
        let sigma = oracle
            .noise_scale(x)
            .ok_or_else(|| GpbaError::Config("noise scale unknown".into()))?;
        let out = tpo_query(oracle, x, sigma, config.policy.tpo_alpha, config.budget_t - used)?;
        let accuracy = if out.k_used < 2 {
            0.5
        } else {
            clamp_estimate(clt_prob(&out.stats)?.0, out.k_used)
        };
        let calls = u64::from(out.k_used);
        recorder.before(used + calls, &f, used, n)?;
        apply_or_skip(step_update(&mut f, x, out.direction, accuracy))?;
        used += calls;
        trace.push(TraceRecord {
            n: n + 1,
            x,
            n_right: out.stats.n_right,
            n_signs: out.stats.n_signs,
            k_used: out.k_used,
            calls,
            budget_used: used,
            accuracy,
            root_estimate: f.median(),
        });
    }
    let metrics = recorder.finish(&f, used, trace.len())?;
    Ok(RunOutput { density: f, metrics, trace, budget_used: used })
}

/// Replays a recorded design with the exact accuracy: same locations and
/// sign counts, with the estimated accuracy replaced by the true one.
///
/// Updates whose location has become one-sided under the exact posterior
/// carry no information and are skipped.
pub fn replay_exact<O: Oracle + ?Sized>(
    trace: &[TraceRecord],
    oracle: &O,
    checkpoints: Vec<u64>,
    alpha: f64,
) -> Result<(PiecewiseDensity, Vec<MetricsRecord>)> {
    let (lo, hi) = oracle.domain();
    let mut g = PiecewiseDensity::uniform(lo, hi)?;
    let mut recorder = Recorder::new(checkpoints, oracle.true_root(), alpha);
    let mut used = 0;
    for (i, r) in trace.iter().enumerate() {
        let p = oracle
            .true_p(r.x)
            .ok_or_else(|| GpbaError::Config("design replay needs the exact accuracy".into()))?;
        recorder.before(r.budget_used, &g, used, i)?;
        let signal = UpdateSignal::Counts { n_right: r.n_right, k: r.n_signs, accuracy: exact_cap(p) };
        apply_or_skip(signal.apply(&mut g, r.x))?;
        used = r.budget_used;
    }
    let metrics = recorder.finish(&g, used, trace.len())?;
    Ok((g, metrics))
}
