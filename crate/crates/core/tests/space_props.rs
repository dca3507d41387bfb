use nalgebra::DMatrix;
use proptest::prelude::*;
use ssdkit::builtins::{self, SetSpec};
use ssdkit::qpos::{is_q_positive, Generator};
use ssdkit::{linalg, QPositiveSet, SsdSpace};

fn banach_builtins() -> Vec<SsdSpace> {
    ["hilbert-identity(3)", "hilbert-negative(2)", "r3-swap", "pairing(1)", "pairing(2)", "product(r3-swap,pairing(1))"]
        .iter()
        .map(|n| builtins::builtin_space(n).unwrap())
        .collect()
}

fn vec_in(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n)
}

#[test]
fn every_listed_builtin_is_banach() {
    assert!(banach_builtins().iter().all(|s| s.is_banach()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn form_is_exactly_symmetric(b in vec_in(5), c in vec_in(5)) {
        let s = builtins::builtin_space("product(r3-swap,pairing(1))").unwrap();
        prop_assert_eq!(s.form(&b, &c).unwrap(), s.form(&c, &b).unwrap());
    }

    #[test]
    fn q_expands_over_differences(b in vec_in(3), c in vec_in(3)) {
        let s = builtins::r3_swap().unwrap();
        let lhs = s.q(&linalg::sub(&b, &c)).unwrap();
        let qb = s.q(&b).unwrap();
        let qc = s.q(&c).unwrap();
        let rhs = qb - s.form(&b, &c).unwrap() + qc;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + qb.abs() + qc.abs()));
    }

    #[test]
    fn banach_builtins_satisfy_cauchy_schwarz_and_p_bounds(b in vec_in(5), c in vec_in(5)) {
        for s in banach_builtins() {
            let n = s.dim();
            let (b, c) = (&b[..n], &c[..n]);
            prop_assert!(s.form(b, c).unwrap().abs() <= linalg::norm(b) * linalg::norm(c) + 1e-9);
            prop_assert!(s.p(b).unwrap() >= -1e-12);
            let lip = linalg::dist(b, c) * (linalg::norm(b) + linalg::norm(c));
            prop_assert!((s.p(b).unwrap() - s.p(c).unwrap()).abs() <= lip + 1e-9);
        }
    }

    #[test]
    fn q_shift_vanishes_at_own_points(t0 in -3.0f64..0.0, t1 in 0.1f64..3.0, n in 2usize..40) {
        let s = builtins::pairing(1).unwrap();
        let a = builtins::builtin_set(&s, &SetSpec::Diagonal { min: t0, max: t1, count: n }).unwrap();
        for p in a.points() {
            let (m, _) = a.inf_q_shift(p);
            prop_assert_eq!(m, 0.0);
        }
    }

    #[test]
    fn spans_of_q_nonnegative_vectors_are_q_positive(v in vec_in(3)) {
        let s = builtins::r3_swap().unwrap();
        prop_assume!(s.q(&v).unwrap() >= 0.0);
        let pts: Vec<Vec<f64>> = (-10..=10).map(|k| linalg::scale(&v, k as f64 * 0.3)).collect();
        prop_assert!(is_q_positive(&s, &pts).unwrap().positive);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_symmetric_forms_have_symmetric_product(entries in prop::collection::vec(-1.0f64..1.0, 6)) {
        // upper triangle, row by row
        const IDX: [[usize; 3]; 3] = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];
        let m = DMatrix::from_fn(3, 3, |i, j| entries[IDX[i][j]]);
        let s = SsdSpace::new(m.clone(), false).unwrap();
        let p = s.product(&s).unwrap();
        prop_assert_eq!(p.dim(), 6);
        prop_assert!(linalg::max_asymmetry(p.form_matrix()) == 0.0);
        prop_assert_eq!(p.is_banach(), s.is_banach());
    }

    #[test]
    fn subsets_of_q_positive_sets_stay_q_positive(keep in prop::collection::vec(any::<bool>(), 41)) {
        let s = builtins::pairing(1).unwrap();
        let a = builtins::diagonal(&s, -2.0, 2.0, 41).unwrap();
        let pts: Vec<Vec<f64>> = a.points().iter().zip(&keep).filter(|(_, k)| **k).map(|(p, _)| p.clone()).collect();
        prop_assume!(!pts.is_empty());
        prop_assert!(QPositiveSet::new(&s, pts, Generator::Custom).is_ok());
    }
}
