//! Sampling policies: where to query next.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::Open01;
use serde::{Deserialize, Serialize};

use crate::density::PiecewiseDensity;
use crate::error::{GpbaError, Result};
use crate::estimators::{tpo_boundary, BatchStats};
use crate::numeric::binary_entropy;
use crate::oracles::Oracle;
use crate::updating::{right_response_prob, Direction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    /// Information-directed sampling over fixed posterior quantiles.
    DetIds,
    /// Information-directed sampling over random posterior quantiles.
    RandIds,
    /// Cycles through a fixed list of posterior quantiles.
    SystQ,
    /// Draws the next point from the current posterior.
    RandQ,
    /// Samples the median repeatedly until a power-one test stops.
    Tpo,
    /// Greedy information gain with the exact accuracy, over a grid.
    TrueIds,
    /// Classical bisection at the posterior median.
    Median,
    /// Uniform over the domain.
    Uniform,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 8] = [
        PolicyKind::DetIds,
        PolicyKind::RandIds,
        PolicyKind::SystQ,
        PolicyKind::RandQ,
        PolicyKind::Tpo,
        PolicyKind::TrueIds,
        PolicyKind::Median,
        PolicyKind::Uniform,
    ];

    pub fn is_ids(self) -> bool {
        matches!(self, PolicyKind::DetIds | PolicyKind::RandIds)
    }

    /// Policies that assume the exact accuracy is known.
    pub fn is_baseline(self) -> bool {
        matches!(self, PolicyKind::TrueIds | PolicyKind::Median | PolicyKind::Uniform)
    }

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::DetIds => "det-ids",
            PolicyKind::RandIds => "rand-ids",
            PolicyKind::SystQ => "syst-q",
            PolicyKind::RandQ => "rand-q",
            PolicyKind::Tpo => "tpo",
            PolicyKind::TrueIds => "true-ids",
            PolicyKind::Median => "median",
            PolicyKind::Uniform => "uniform",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = GpbaError;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| GpbaError::Parse(format!("unknown policy {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// Candidate quantiles for det-ids, rotation for syst-q.
    pub quantiles: Vec<f64>,
    /// Candidates per iteration for rand-ids.
    pub m_candidates: usize,
    pub tpo_alpha: f64,
    /// Grid resolution for true-ids.
    pub grid_size: usize,
}

impl PolicySpec {
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            quantiles: vec![0.25, 0.75],
            m_candidates: 2,
            tpo_alpha: 0.05,
            grid_size: 1001,
        }
    }

    /// Candidate locations queried per macro-iteration.
    pub fn candidates(&self) -> usize {
        match self.kind {
            PolicyKind::DetIds => self.quantiles.len(),
            PolicyKind::RandIds => self.m_candidates,
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.quantiles.is_empty()
            || self.quantiles.iter().any(|q| !(*q > 0.0 && *q < 1.0))
            || self.quantiles.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(GpbaError::Config(
                "quantiles must be strictly increasing values in (0, 1)".into(),
            ));
        }
        if self.kind.is_ids() && self.candidates() < 2 {
            return Err(GpbaError::Config("information-directed sampling needs at least 2 candidates".into()));
        }
        if self.kind == PolicyKind::Tpo && !(self.tpo_alpha > 0.0 && self.tpo_alpha < 1.0) {
            return Err(GpbaError::InvalidProbability(self.tpo_alpha));
        }
        if self.kind == PolicyKind::TrueIds && self.grid_size < 1 {
            return Err(GpbaError::Config("grid size must be positive".into()));
        }
        Ok(())
    }
}

/// Expected entropy reduction about the root from one response at `x` with
/// accuracy `p`, in nats.
pub fn info_gain(f: &PiecewiseDensity, x: f64, p: f64) -> f64 {
    (binary_entropy(right_response_prob(f, x, p)) - binary_entropy(p)).max(0.0)
}

fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

/// Candidate locations for an information-directed step.
pub fn ids_candidates<R: Rng + ?Sized>(f: &PiecewiseDensity, spec: &PolicySpec, rng: &mut R) -> Result<Vec<f64>> {
    match spec.kind {
        PolicyKind::DetIds => spec
            .quantiles
            .iter()
            .map(|&q| f.quantile(q).map(|x| f.nudge_into_support(x)))
            .collect(),
        PolicyKind::RandIds => {
            let mut out: Vec<f64> = Vec::with_capacity(spec.m_candidates);
            while out.len() < spec.m_candidates {
                let x = f.nudge_into_support(f.quantile(open01(rng))?);
                if out.iter().all(|y| (x - y).abs() > 1e-12) {
                    out.push(x);
                }
            }
            Ok(out)
        }
        other => Err(GpbaError::Config(format!("{other} does not propose candidates"))),
    }
}

/// Index of the `(location, accuracy)` pair with the largest information
/// gain; ties go to the lowest index.
pub fn ids_select(f: &PiecewiseDensity, candidates: &[(f64, f64)]) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &(x, p)) in candidates.iter().enumerate() {
        let gain = info_gain(f, x, p);
        if best.is_none_or(|(_, g)| gain > g) {
            best = Some((i, gain));
        }
    }
    best.map(|(i, _)| i).ok_or(GpbaError::EmptyCandidates)
}

/// Quantile `n mod M` of the rotation list.
pub fn syst_q_next(f: &PiecewiseDensity, spec: &PolicySpec, n: usize) -> Result<f64> {
    let q = spec.quantiles[n % spec.quantiles.len()];
    Ok(f.nudge_into_support(f.quantile(q)?))
}

/// A draw from the current posterior.
pub fn rand_q_next<R: Rng + ?Sized>(f: &PiecewiseDensity, rng: &mut R) -> f64 {
    let x = f.quantile(open01(rng)).expect("open unit draw");
    f.nudge_into_support(x)
}

/// Next point for the known-accuracy baselines.
pub fn baseline_next<O, R>(f_true: &PiecewiseDensity, spec: &PolicySpec, oracle: &O, rng: &mut R) -> Result<f64>
where
    O: Oracle + ?Sized,
    R: Rng + ?Sized,
{
    let (lo, hi) = oracle.domain();
    let x = match spec.kind {
        PolicyKind::TrueIds => {
            let n = spec.grid_size;
            let mut best = (lo + 0.5 * (hi - lo), f64::NEG_INFINITY);
            for i in 0..n {
                let x = lo + (hi - lo) * (i + 1) as f64 / (n + 1) as f64;
                let p = oracle
                    .true_p(x)
                    .ok_or_else(|| GpbaError::Config("true-ids needs the exact accuracy".into()))?;
                let gain = info_gain(f_true, x, p);
                if gain > best.1 {
                    best = (x, gain);
                }
            }
            best.0
        }
        PolicyKind::Median => f_true.median(),
        PolicyKind::Uniform => lo + (hi - lo) * open01(rng),
        other => return Err(GpbaError::Config(format!("{other} is not a baseline policy"))),
    };
    Ok(f_true.nudge_into_support(x))
}

/// Result of one power-one test at a single location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TpoOutcome {
    pub direction: Direction,
    pub k_used: u32,
    pub stats: BatchStats,
    /// Whether the boundary was crossed (as opposed to running out of budget).
    pub crossed: bool,
}

/// Queries `x` one response at a time until the running sum crosses the
/// power-one boundary or `budget_left` responses have been used.
pub fn tpo_query<O: Oracle + ?Sized>(
    oracle: &mut O,
    x: f64,
    sigma: f64,
    alpha: f64,
    budget_left: u64,
) -> Result<TpoOutcome> {
    if budget_left == 0 {
        return Err(GpbaError::Config("no budget left for a power-one test".into()));
    }
    let mut stats = BatchStats::from_values(&[]);
    let mut sum = 0.0;
    let mut crossed = false;
    while u64::from(stats.k) < budget_left {
        let z = oracle.sample(x)?;
        stats.push(z);
        sum += z;
        if sum.abs() >= tpo_boundary(stats.k, sigma, alpha) {
            crossed = true;
            break;
        }
    }
    Ok(TpoOutcome {
        direction: Direction::from_value(sum),
        k_used: stats.k,
        stats,
        crossed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{SyntheticOracle, TestFunction};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit() -> PiecewiseDensity {
        PiecewiseDensity::uniform(0.0, 1.0).unwrap()
    }

    #[test]
    fn gain_examples() {
        let f = unit();
        assert_eq!(info_gain(&f, 0.3, 0.5), 0.0);
        assert_abs_diff_eq!(info_gain(&f, 0.5, 1.0), std::f64::consts::LN_2, epsilon = 1e-15);
        let expected = binary_entropy(0.6) - binary_entropy(0.7);
        assert_abs_diff_eq!(info_gain(&f, 0.25, 0.7), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(info_gain(&f, 0.25, 0.7), 0.0621, epsilon = 1e-4);
    }

    #[test]
    fn deterministic_candidates() {
        let spec = PolicySpec::new(PolicyKind::DetIds);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let before = rng.clone();
        let c = ids_candidates(&unit(), &spec, &mut rng).unwrap();
        assert_abs_diff_eq!(c[0], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(c[1], 0.75, epsilon = 1e-15);
        assert_eq!(rng, before);
    }

    #[test]
    fn random_candidates_are_distinct() {
        let spec = PolicySpec { m_candidates: 5, ..PolicySpec::new(PolicyKind::RandIds) };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = ids_candidates(&unit(), &spec, &mut rng).unwrap();
        assert_eq!(c.len(), 5);
        for i in 0..5 {
            for j in 0..i {
                assert!((c[i] - c[j]).abs() > 1e-12);
            }
        }
    }

    #[test]
    fn selection_rules() {
        let f = unit();
        assert_eq!(ids_select(&f, &[(0.25, 0.7), (0.75, 0.5)]).unwrap(), 0);
        assert_eq!(ids_select(&f, &[(0.25, 0.7), (0.75, 0.7)]).unwrap(), 0);
        assert_eq!(ids_select(&f, &[(0.25, 0.5), (0.75, 0.6)]).unwrap(), 1);
        assert!(matches!(ids_select(&f, &[]), Err(GpbaError::EmptyCandidates)));
    }

    #[test]
    fn systematic_rotation() {
        let spec = PolicySpec::new(PolicyKind::SystQ);
        let f = unit();
        let got: Vec<f64> = [0, 1, 2, 7].iter().map(|&n| syst_q_next(&f, &spec, n).unwrap()).collect();
        assert_eq!(got, vec![0.25, 0.75, 0.25, 0.75]);
    }

    #[test]
    fn baselines_on_uniform_prior() {
        let f = unit();
        let oracle = SyntheticOracle::new(TestFunction::H1, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let median = baseline_next(&f, &PolicySpec::new(PolicyKind::Median), &oracle, &mut rng).unwrap();
        assert_eq!(median, 0.5);
        let x = baseline_next(&f, &PolicySpec::new(PolicyKind::TrueIds), &oracle, &mut rng).unwrap();
        assert!((x - 1.0 / 3.0).abs() > 0.01);
        assert_eq!(info_gain(&f, 1.0 / 3.0, oracle.true_p(1.0 / 3.0).unwrap()), 0.0);
        let u = baseline_next(&f, &PolicySpec::new(PolicyKind::Uniform), &oracle, &mut rng).unwrap();
        assert!(u > 0.0 && u < 1.0);
    }

    #[test]
    fn tpo_with_one_call_left() {
        let mut oracle = SyntheticOracle::new(TestFunction::H1, 5);
        let out = tpo_query(&mut oracle, 0.2, 0.2, 0.05, 1).unwrap();
        assert_eq!(out.k_used, 1);
        let z = out.stats.moments.unwrap().sum_z;
        assert_eq!(out.direction, Direction::from_value(z));
    }

    #[test]
    fn spec_validation() {
        assert!(PolicySpec::new(PolicyKind::DetIds).validate().is_ok());
        let bad = PolicySpec { quantiles: vec![0.75, 0.25], ..PolicySpec::new(PolicyKind::SystQ) };
        assert!(bad.validate().is_err());
        let one = PolicySpec { m_candidates: 1, ..PolicySpec::new(PolicyKind::RandIds) };
        assert!(one.validate().is_err());
        assert_eq!("rand-q".parse::<PolicyKind>().unwrap(), PolicyKind::RandQ);
    }
}
