use proptest::prelude::*;
use wishart_stc::pep::{pep_given_sq_norm, ChannelParams};
use wishart_stc::rmt::{hermitian_eigenvalues, sample_complex_gaussian, wishart_from};
use wishart_stc::rng::{stream, Domain};
use wishart_stc::special::{hyp1f1_terminating, regularized_q};
use wishart_stc::stc::{diff_gram, frobenius_norm, spectral_norm};
use wishart_stc::{Complex64, ComplexMatrix};

fn entry() -> impl Strategy<Value = Complex64> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(entry(), rows * cols).prop_map(move |d| ComplexMatrix::from_vec(rows, cols, d).unwrap())
}

fn any_matrix() -> impl Strategy<Value = ComplexMatrix> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| matrix(r, c))
}

/// Two matrices of one shape.
fn same_shape_pair() -> impl Strategy<Value = (ComplexMatrix, ComplexMatrix)> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| (matrix(r, c), matrix(r, c)))
}

fn square_pair() -> impl Strategy<Value = (ComplexMatrix, ComplexMatrix)> {
    (1usize..5).prop_flat_map(|n| (matrix(n, n), matrix(n, n)))
}

fn slack(scale: f64) -> f64 {
    1e-9 * (1.0 + scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn spectral_norm_axioms(
        (a, b) in same_shape_pair(),
        (p, q) in square_pair(),
        alpha in entry(),
    ) {
        let (na, nb) = (spectral_norm(&a), spectral_norm(&b));
        // Nonnegativity and definiteness.
        prop_assert!(na >= 0.0);
        prop_assert_eq!(spectral_norm(&ComplexMatrix::zeros(a.rows(), a.cols())), 0.0);
        if a.max_abs() > 0.0 {
            prop_assert!(na > 0.0);
        }
        // Absolute homogeneity.
        let scaled = spectral_norm(&a.scale(alpha));
        prop_assert!((scaled - alpha.norm() * na).abs() <= slack(alpha.norm() * na));
        // Triangle inequality.
        prop_assert!(spectral_norm(&(&a + &b)) <= na + nb + slack(na + nb));
        // Submultiplicativity.
        let (np, nq) = (spectral_norm(&p), spectral_norm(&q));
        prop_assert!(spectral_norm(&(&p * &q)) <= np * nq + slack(np * nq));
    }

    #[test]
    fn spectral_and_frobenius_norms_are_ordered(m in any_matrix()) {
        let two = spectral_norm(&m);
        let fro = frobenius_norm(&m);
        let g = if m.rows() <= m.cols() { m.gram() } else { m.adjoint().gram() };
        let ev = hermitian_eigenvalues(&g).unwrap();
        let rank = ev.values().iter().filter(|&&v| v > 1e-9 * ev.largest()).count();
        prop_assert!(two <= fro + slack(fro));
        prop_assert!(fro <= (rank as f64).sqrt() * two + slack(fro));
    }

    #[test]
    fn diff_gram_is_symmetric_in_the_pair((c, e) in same_shape_pair()) {
        let a = diff_gram(&c, &e).unwrap();
        prop_assert_eq!(&a, &diff_gram(&e, &c).unwrap());
        prop_assert_eq!(a.hermitian_defect(), Some(0.0));
    }

    #[test]
    fn wishart_outputs_are_hermitian_psd(m in 1usize..6, extra in 0usize..6, seed in any::<u64>()) {
        let a = sample_complex_gaussian(m, m + extra, 1.0, &mut stream(seed, Domain::User, 0)).unwrap();
        let w = wishart_from(&a);
        prop_assert!(w.hermitian_defect().unwrap() <= 1e-12 * w.max_abs());
        let ev = hermitian_eigenvalues(&w).unwrap();
        let tr = w.trace().re;
        prop_assert!(ev.values().iter().all(|&v| v >= 0.0));
        prop_assert!((ev.values().iter().sum::<f64>() - tr).abs() <= 1e-8 * tr);
    }

    #[test]
    fn regularized_q_is_a_decreasing_probability(m in 1u64..40, x in 0.0..80.0f64, dx in 1e-3..5.0f64) {
        let q0 = regularized_q(m, x).unwrap();
        let q1 = regularized_q(m, x + dx).unwrap();
        prop_assert!((0.0..=1.0).contains(&q0));
        prop_assert!(q1 <= q0);
    }

    #[test]
    fn hyp1f1_at_zero_is_one(a in -20i64..=0, b in 0.5..30.0f64) {
        prop_assert_eq!(hyp1f1_terminating(a, b, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn conditional_pep_is_nonincreasing(s in 0.0..200.0f64, ds in 0.0..20.0f64, n0 in 0.05..5.0f64) {
        let params = ChannelParams::new(2, 2, 2, n0).unwrap();
        prop_assert!(pep_given_sq_norm(s + ds, &params).unwrap() <= pep_given_sq_norm(s, &params).unwrap());
    }
}
