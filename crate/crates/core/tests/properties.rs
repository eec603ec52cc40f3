//! Property tests for the structural invariants that hold over the whole
//! parameter space rather than at chosen points.

use proptest::prelude::*;

use qcorr::correlate;
use qcorr::inequalities;
use qcorr::linalg::{Complex64, ComplexMatrix};
use qcorr::spin::{Direction, LabelVector, SpinMagnitude};
use qcorr::states::{clebsch_gordan_singlet, density};

fn hermitian_strategy(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec(-1.0f64..1.0, dim * dim * 2).prop_map(move |vals| {
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for k in 0..dim {
                let idx = 2 * (i * dim + k);
                m.set(i, k, Complex64::new(vals[idx], vals[idx + 1]));
            }
        }
        m.add(&m.dagger()).unwrap().scale_re(0.5)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn eigh_reconstructs_random_hermitian(dim in 2usize..9, seed_m in hermitian_strategy(8)) {
        // Take the leading dim×dim block so one strategy covers all sizes.
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for k in 0..dim {
                m.set(i, k, seed_m.get(i, k));
            }
        }
        let es = m.eigh().unwrap();
        let scale = m.frobenius_norm().max(1.0);
        prop_assert!(es.reconstruct().max_abs_diff(&m) <= 1e-10 * scale);
        let vtv = es.eigenvector_matrix().dagger().matmul(es.eigenvector_matrix()).unwrap();
        prop_assert!(vtv.max_abs_diff(&ComplexMatrix::identity(dim)) <= 1e-10);
        for w in es.eigenvalues().windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn kron_mixed_product_rule(a in hermitian_strategy(2), b in hermitian_strategy(2),
                               c in hermitian_strategy(2), d in hermitian_strategy(2)) {
        // (A ⊗ B)(C ⊗ D) = (AC) ⊗ (BD)
        let lhs = a.kron(&b).unwrap().matmul(&c.kron(&d).unwrap()).unwrap();
        let rhs = a.matmul(&c).unwrap().kron(&b.matmul(&d).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn direction_normalization_preserves_the_unit_vector(theta in -12.0f64..12.0, phi in -12.0f64..12.0) {
        let dir = Direction::new(theta, phi).unwrap();
        prop_assert!((0.0..=std::f64::consts::PI).contains(&dir.theta()));
        prop_assert!((0.0..std::f64::consts::TAU).contains(&dir.phi()));
        let raw = (
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        );
        let norm = (
            dir.theta().sin() * dir.phi().cos(),
            dir.theta().sin() * dir.phi().sin(),
            dir.theta().cos(),
        );
        prop_assert!((raw.0 - norm.0).abs() <= 1e-9);
        prop_assert!((raw.1 - norm.1).abs() <= 1e-9);
        prop_assert!((raw.2 - norm.2).abs() <= 1e-9);
    }

    #[test]
    fn azimuthal_gauge_for_spin_one_labels(
        t1 in 0.0f64..std::f64::consts::PI,
        t2 in 0.0f64..std::f64::consts::PI,
        p1 in 0.0f64..std::f64::consts::TAU,
        p2 in 0.0f64..std::f64::consts::TAU,
        delta in 0.0f64..std::f64::consts::TAU,
        labels in proptest::array::uniform3(-2.0f64..2.0),
    ) {
        let j = SpinMagnitude::ONE;
        let rho = density(&clebsch_gordan_singlet(j)).unwrap();
        let lv = LabelVector::new(labels.to_vec()).unwrap();
        let e = |q1: f64, q2: f64| {
            correlate::pair_correlation(
                &rho,
                j,
                [Direction::new(t1, q1).unwrap(), Direction::new(t2, q2).unwrap()],
                [&lv, &lv],
            )
            .unwrap()
        };
        prop_assert!((e(p1, p2) - e(p1 + delta, p2 + delta)).abs() <= 1e-10);
    }

    #[test]
    fn fourier_partial_sums_are_antisymmetric(x in 0.0f64..std::f64::consts::FRAC_PI_2,
                                              terms in 1usize..3000) {
        let half = std::f64::consts::FRAC_PI_2;
        let plus = inequalities::sign_fourier_partial(half + x, terms).unwrap();
        let minus = inequalities::sign_fourier_partial(half - x, terms).unwrap();
        prop_assert!((plus + minus).abs() <= 1e-12);
    }

    #[test]
    fn joint_tables_normalize_and_bound_correlations(
        t1 in 0.0f64..std::f64::consts::PI,
        t2 in 0.0f64..std::f64::consts::PI,
        p1 in 0.0f64..std::f64::consts::TAU,
        p2 in 0.0f64..std::f64::consts::TAU,
        labels in proptest::array::uniform4(-2.0f64..2.0),
    ) {
        let j = SpinMagnitude::THREE_HALVES;
        let rho = density(&clebsch_gordan_singlet(j)).unwrap();
        let dirs = [Direction::new(t1, p1).unwrap(), Direction::new(t2, p2).unwrap()];
        let table = correlate::joint_probabilities(&rho, &dirs, &[j, j]).unwrap();
        prop_assert!((table.sum() - 1.0).abs() <= 1e-10);
        let lv = LabelVector::new(labels.to_vec()).unwrap();
        let e = correlate::pair_correlation(&rho, j, dirs, [&lv, &lv]).unwrap();
        prop_assert!(e.abs() <= lv.max_abs().powi(2) + 1e-10);
    }
}
