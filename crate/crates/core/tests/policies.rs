use gpba::policies::{baseline_next, ids_candidates, ids_select, info_gain, rand_q_next, syst_q_next, tpo_query};
use gpba::updating::step_update;
use gpba::{Direction, PiecewiseDensity, PolicyKind, PolicySpec, SyntheticOracle, TestFunction};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shaped(ops: &[(f64, bool)]) -> PiecewiseDensity {
    let mut f = PiecewiseDensity::uniform(0.0, 1.0).unwrap();
    for &(x, right) in ops {
        step_update(&mut f, x, if right { Direction::Right } else { Direction::Left }, 0.95).unwrap();
    }
    f
}

fn ops() -> impl Strategy<Value = Vec<(f64, bool)>> {
    prop::collection::vec((0.05f64..0.95, any::<bool>()), 0..30)
}

proptest! {
    #[test]
    fn gain_is_nonnegative_and_zero_only_for_coin_flips(ops in ops(), x in 0.01f64..0.99, p in 0.5f64..=1.0) {
        let f = shaped(&ops);
        let g = info_gain(&f, x, p);
        prop_assert!(g >= 0.0);
        prop_assert_eq!(info_gain(&f, x, 0.5), 0.0);
        let interior = f.cdf(x) > 1e-6 && f.upper_mass(x) > 1e-6;
        if interior && p > 0.51 {
            prop_assert!(g > 0.0);
        }
    }

    #[test]
    fn proposals_stay_in_positive_mass(ops in ops(), seed in any::<u64>()) {
        let f = shaped(&ops);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let oracle = SyntheticOracle::new(TestFunction::H1, 0);
        let mut xs = vec![rand_q_next(&f, &mut rng)];
        for n in 0..3 {
            xs.push(syst_q_next(&f, &PolicySpec::new(PolicyKind::SystQ), n).unwrap());
        }
        for kind in [PolicyKind::DetIds, PolicyKind::RandIds] {
            xs.extend(ids_candidates(&f, &PolicySpec::new(kind), &mut rng).unwrap());
        }
        for kind in [PolicyKind::Median, PolicyKind::TrueIds, PolicyKind::Uniform] {
            xs.push(baseline_next(&f, &PolicySpec::new(kind), &oracle, &mut rng).unwrap());
        }
        for (i, x) in xs.into_iter().enumerate() {
            prop_assert!(f.density_at(x) > 0.0, "proposal {} at {} has no mass", i, x);
            prop_assert!(x > 0.0 && x < 1.0);
        }
    }
}

#[test]
fn syst_q_rotates_without_randomness() {
    let f = shaped(&[(0.3, true)]);
    let spec = PolicySpec::new(PolicyKind::SystQ);
    let seq: Vec<f64> = (0..4).map(|n| syst_q_next(&f, &spec, n).unwrap()).collect();
    assert_eq!(seq[0], seq[2]);
    assert_eq!(seq[1], seq[3]);
    assert!(seq[0] < seq[1]);
}

#[test]
fn ids_select_prefers_information() {
    let f = PiecewiseDensity::uniform(0.0, 1.0).unwrap();
    assert_eq!(ids_select(&f, &[(0.25, 0.5), (0.75, 0.7)]).unwrap(), 1);
    assert_eq!(ids_select(&f, &[(0.25, 0.7), (0.75, 0.7)]).unwrap(), 0);
    assert!(ids_select(&f, &[]).is_err());
}

#[test]
fn rand_ids_candidates_are_distinct() {
    let f = PiecewiseDensity::uniform(0.0, 1.0).unwrap();
    let mut spec = PolicySpec::new(PolicyKind::RandIds);
    spec.m_candidates = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let xs = ids_candidates(&f, &spec, &mut rng).unwrap();
    assert_eq!(xs.len(), 5);
    for i in 0..5 {
        for j in i + 1..5 {
            assert!((xs[i] - xs[j]).abs() > 1e-12);
        }
    }
}

#[test]
fn power_one_test_truncates_at_budget() {
    let mut oracle = SyntheticOracle::new(TestFunction::H1, 1);
    let root = TestFunction::H1.root();
    let out = tpo_query(&mut oracle, root, 0.2, 0.05, 1).unwrap();
    assert_eq!(out.k_used, 1);
    let out = tpo_query(&mut oracle, root, 0.2, 0.05, 500).unwrap();
    assert!(out.k_used <= 500);
    assert!(tpo_query(&mut oracle, root, 0.2, 0.05, 0).is_err());
}

#[test]
fn power_one_test_points_toward_root() {
    let mut oracle = SyntheticOracle::new(TestFunction::H1, 2);
    for _ in 0..50 {
        assert_eq!(tpo_query(&mut oracle, 0.1, 0.2, 0.05, 100_000).unwrap().direction, Direction::Right);
        assert_eq!(tpo_query(&mut oracle, 0.6, 0.2, 0.05, 100_000).unwrap().direction, Direction::Left);
    }
}
