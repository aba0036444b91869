use gpba::updating::{batched_update, right_scaling_factor, step_update};
use gpba::{Direction, PiecewiseDensity, UpdateSignal};
use proptest::prelude::*;

fn max_gap(a: &PiecewiseDensity, b: &PiecewiseDensity) -> f64 {
    assert_eq!(a.knots(), b.knots());
    a.knots()
        .windows(2)
        .map(|w| {
            let m = 0.5 * (w[0] + w[1]);
            (a.density_at(m) - b.density_at(m)).abs()
        })
        .fold(0.0, f64::max)
}

fn prior(ops: &[(f64, bool, f64)]) -> PiecewiseDensity {
    let mut f = PiecewiseDensity::uniform(0.0, 1.0).unwrap();
    for &(x, right, p) in ops {
        let dir = if right { Direction::Right } else { Direction::Left };
        step_update(&mut f, x, dir, p).unwrap();
    }
    f
}

fn prior_ops() -> impl Strategy<Value = Vec<(f64, bool, f64)>> {
    prop::collection::vec((0.05f64..0.95, any::<bool>(), 0.5f64..0.8), 0..5)
}

proptest! {
    #[test]
    fn batch_equals_any_sequence(
        ops in prior_ops(),
        x in 0.05f64..0.95,
        p in 0.5f64..0.95,
        signs in prop::collection::vec(any::<bool>(), 1..25),
    ) {
        let k = signs.len() as u32;
        let b = signs.iter().filter(|&&s| s).count() as u32;
        let mut batched = prior(&ops);
        batched_update(&mut batched, x, &UpdateSignal::Counts { n_right: b, k, accuracy: p }).unwrap();
        let mut seq = prior(&ops);
        for &s in &signs {
            step_update(&mut seq, x, if s { Direction::Right } else { Direction::Left }, p).unwrap();
        }
        prop_assert!(max_gap(&batched, &seq) < 1e-10);
    }

    #[test]
    fn updates_commute(
        ops in prior_ops(),
        (x1, x2) in (0.05f64..0.95, 0.05f64..0.95),
        (b1, b2) in (0u32..=10, 0u32..=10),
        (p1, p2) in (0.5f64..0.9, 0.5f64..0.9),
    ) {
        let s1 = UpdateSignal::Counts { n_right: b1, k: 10, accuracy: p1 };
        let s2 = UpdateSignal::Counts { n_right: b2, k: 10, accuracy: p2 };
        let mut a = prior(&ops);
        batched_update(&mut a, x1, &s1).unwrap();
        batched_update(&mut a, x2, &s2).unwrap();
        let mut b = prior(&ops);
        batched_update(&mut b, x2, &s2).unwrap();
        batched_update(&mut b, x1, &s1).unwrap();
        prop_assert!(max_gap(&a, &b) < 1e-10);
    }

    #[test]
    fn majority_right_scales_right_up(x in 0.05f64..0.95, p in 0.55f64..0.95, k in 1u32..40) {
        let f = PiecewiseDensity::uniform(0.0, 1.0).unwrap();
        let b = k / 2 + 1;
        let factor = right_scaling_factor(&f, x, &UpdateSignal::Counts { n_right: b, k, accuracy: p }).unwrap();
        prop_assert!(factor > 1.0);
    }

    #[test]
    fn coin_flip_accuracy_is_a_no_op(x in 0.05f64..0.95, b in 0u32..=20) {
        let mut f = PiecewiseDensity::uniform(0.0, 1.0).unwrap();
        batched_update(&mut f, x, &UpdateSignal::Counts { n_right: b, k: 20, accuracy: 0.5 }).unwrap();
        prop_assert!((f.density_at(0.01) - 1.0).abs() < 1e-12);
        prop_assert!((f.density_at(0.99) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn boosted_matches_single_step() {
    let mut a = PiecewiseDensity::uniform(0.0, 1.0).unwrap();
    UpdateSignal::Boosted { direction: Direction::Left, accuracy: 0.8 }.apply(&mut a, 0.6).unwrap();
    let mut b = PiecewiseDensity::uniform(0.0, 1.0).unwrap();
    step_update(&mut b, 0.6, Direction::Left, 0.8).unwrap();
    assert_eq!(a, b);
}

#[test]
fn tiny_tail_is_still_updatable() {
    let mut f = PiecewiseDensity::uniform(0.0, 1.0).unwrap();
    for _ in 0..40 {
        step_update(&mut f, 0.8, Direction::Left, 0.9).unwrap();
    }
    assert_eq!(f.cdf(0.8), 1.0);
    step_update(&mut f, 0.8, Direction::Right, 0.9).unwrap();
    assert!((f.total_mass() - 1.0).abs() < 1e-12);
}
