use ipm_fs::{w1_equal_size, w1_general, wp_general, EmpiricalMeasure1D};
use ipm_fs_oracles::{exact_ot_assignment_1d, replicate_to_uniform};
use proptest::prelude::*;

fn sample(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0..100.0f64, 1..=max)
}

fn weighted(max: usize) -> impl Strategy<Value = EmpiricalMeasure1D> {
    prop::collection::vec((-100.0..100.0f64, 0.01..1.0f64), 1..=max).prop_map(|atoms| {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let values = atoms.iter().map(|a| a.0).collect();
        let weights = atoms.iter().map(|a| a.1 / total).collect();
        EmpiricalMeasure1D::new(values, weights).unwrap()
    })
}

fn uniform(v: Vec<f64>) -> EmpiricalMeasure1D {
    EmpiricalMeasure1D::uniform(v).unwrap()
}

proptest! {
    #[test]
    fn matches_assignment_oracle(pair in (1usize..=7).prop_flat_map(|n| {
        (prop::collection::vec(-10.0..10.0f64, n), prop::collection::vec(-10.0..10.0f64, n))
    })) {
        let (x, y) = pair;
        let oracle = exact_ot_assignment_1d(&x, &y).unwrap();
        let p = uniform(x);
        let q = uniform(y);
        prop_assert!((w1_general(&p, &q) - oracle).abs() <= 1e-10);
        prop_assert!((w1_equal_size(&p, &q).unwrap() - oracle).abs() <= 1e-10);
    }

    #[test]
    fn symmetric_and_nonnegative(p in weighted(10), q in weighted(10)) {
        let a = w1_general(&p, &q);
        prop_assert!(a >= 0.0);
        prop_assert!((a - w1_general(&q, &p)).abs() <= 1e-12);
        prop_assert_eq!(w1_general(&p, &p), 0.0);
    }

    #[test]
    fn triangle_inequality(p in weighted(8), q in weighted(8), r in weighted(8)) {
        prop_assert!(w1_general(&p, &q) <= w1_general(&p, &r) + w1_general(&r, &q) + 1e-9);
    }

    #[test]
    fn translation_and_scaling(p in weighted(8), q in weighted(8), c in -50.0..50.0f64, a in -5.0..5.0f64) {
        let base = w1_general(&p, &q);
        let shifted = w1_general(&p.affine(1.0, c).unwrap(), &q.affine(1.0, c).unwrap());
        prop_assert!((shifted - base).abs() <= 1e-10 * (1.0 + base));
        let scaled = w1_general(&p.affine(a, 0.0).unwrap(), &q.affine(a, 0.0).unwrap());
        prop_assert!((scaled - a.abs() * base).abs() <= 1e-10 * (1.0 + a.abs() * base));
    }

    #[test]
    fn pure_shift_costs_the_shift(x in sample(12), c in -20.0..20.0f64) {
        let p = uniform(x.clone());
        let q = uniform(x.iter().map(|v| v + c).collect());
        prop_assert!((w1_general(&p, &q) - c.abs()).abs() <= 1e-9);
    }

    #[test]
    fn order_one_agrees_and_higher_orders_dominate(p in weighted(8), q in weighted(8)) {
        let w1 = w1_general(&p, &q);
        prop_assert!((wp_general(&p, &q, 1.0).unwrap() - w1).abs() <= 1e-9 * (1.0 + w1));
        let w2 = wp_general(&p, &q, 2.0).unwrap();
        let w3 = wp_general(&p, &q, 3.0).unwrap();
        prop_assert!(w1 <= w2 + 1e-9 * (1.0 + w2));
        prop_assert!(w2 <= w3 + 1e-9 * (1.0 + w3));
    }

    #[test]
    fn equal_size_path_agrees(pair in (1usize..=40).prop_flat_map(|n| {
        (prop::collection::vec(-100.0..100.0f64, n), prop::collection::vec(-100.0..100.0f64, n))
    })) {
        let p = uniform(pair.0);
        let q = uniform(pair.1);
        let a = w1_equal_size(&p, &q).unwrap();
        prop_assert!((a - w1_general(&p, &q)).abs() <= 1e-10 * (1.0 + a));
    }

    #[test]
    fn replication_preserves_distance(
        p_counts in prop::collection::vec((-10.0..10.0f64, 1u32..=4), 1..=5),
        q_counts in prop::collection::vec((-10.0..10.0f64, 1u32..=4), 1..=5),
    ) {
        let build = |atoms: &[(f64, u32)]| {
            let total: u32 = atoms.iter().map(|a| a.1).sum();
            EmpiricalMeasure1D::new(
                atoms.iter().map(|a| a.0).collect(),
                atoms.iter().map(|a| a.1 as f64 / total as f64).collect(),
            )
            .unwrap()
        };
        let p = build(&p_counts);
        let q = build(&q_counts);
        let (pu, qu) = replicate_to_uniform(&p, &q).unwrap();
        prop_assert!((w1_general(&p, &q) - w1_equal_size(&pu, &qu).unwrap()).abs() <= 1e-12);
        prop_assert!((w1_general(&p, &q) - w1_general(&pu, &qu)).abs() <= 1e-12);
    }

    #[test]
    fn splitting_atoms_changes_nothing(p in weighted(8), q in weighted(8)) {
        let split = EmpiricalMeasure1D::new(
            p.values().iter().flat_map(|&x| [x, x]).collect(),
            p.weights().iter().flat_map(|&w| [w / 2.0, w / 2.0]).collect(),
        )
        .unwrap();
        prop_assert!(w1_general(&p, &split) <= 1e-12);
        prop_assert!((w1_general(&p, &q) - w1_general(&split, &q)).abs() <= 1e-12);
    }
}

#[test]
fn unequal_sizes_need_the_general_path() {
    let p = uniform(vec![0.0, 1.0]);
    let q = uniform(vec![0.0, 1.0, 2.0]);
    let err = w1_equal_size(&p, &q).unwrap_err();
    assert!(err.to_string().contains("w1_general"), "{err}");
    assert!((w1_general(&p, &q) - 0.5).abs() < 1e-15);
}
