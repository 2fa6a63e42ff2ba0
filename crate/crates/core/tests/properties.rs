use num_rational::BigRational;
use proptest::prelude::*;

use bergman_lab::distance::{gram_entry, theorem11_residual, Precision};
use bergman_lab::family::{psi_inverse, psi_map, WeightedSeq};
use bergman_lab::operators::{adjoint_deviation, apply_t, leading_index, left_inverse_deviation, semigroup_deviation, verify_isometry};
use bergman_lab::scalar::rat;
use bergman_lab::series::{max_deviation, CoeffSeries};

fn exact_series(max_len: usize) -> impl Strategy<Value = CoeffSeries> {
    prop::collection::vec((-20i64..=20, 1i64..=12), 1..max_len)
        .prop_map(|v| CoeffSeries::from_rationals(v.into_iter().map(|(n, d)| rat(n, d)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn semigroup(f in exact_series(16), j in 1u64..=8, k in 1u64..=8) {
        prop_assert_eq!(semigroup_deviation(j, k, &f), 0.0);
    }

    #[test]
    fn isometry(f in exact_series(60), k in 1u64..=12) {
        let (a, b) = verify_isometry(k, &f);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn left_inverse(f in exact_series(60), k in 1u64..=12) {
        prop_assert_eq!(left_inverse_deviation(k, &f), 0.0);
    }

    #[test]
    fn adjoint_duality(f in exact_series(20), k in 1u64..=6, seed in any::<u64>()) {
        let g = CoeffSeries::random_exact(k as usize * f.order() + k as usize - 1, seed);
        prop_assert_eq!(adjoint_deviation(k, &f, &g).unwrap(), 0.0);
    }

    #[test]
    fn leading_index_law(f in exact_series(30), k in 1u64..=9) {
        prop_assume!(!f.is_zero());
        let (l, p) = leading_index(k, &f).unwrap();
        prop_assert_eq!(p, k as usize * l + k as usize - 1);
        if k >= 2 {
            // T_k f starts strictly later, so it is never a nonzero multiple of f
            prop_assert!(p > l);
            prop_assert!(max_deviation(&apply_t(k, &f), &f).unwrap() > 0.0);
        }
    }

    #[test]
    fn psi_round_trip(v in prop::collection::vec((-30i64..=30, 1i64..=9), 1..80)) {
        let vals: Vec<BigRational> = v.into_iter().map(|(n, d)| rat(n, d)).collect();
        let f = WeightedSeq::from_rationals(vals);
        let image = psi_map(&f);
        prop_assert_eq!(f.weighted_norm_sq(), bergman_lab::series::norm_sq_a21(&image));
        prop_assert_eq!(psi_inverse(&image), f);
    }

    #[test]
    fn gram_symmetry(j in 2u64..=40, k in 2u64..=40) {
        prop_assert_eq!(gram_entry(j, k, Precision::Digamma).unwrap(), gram_entry(k, j, Precision::Digamma).unwrap());
        let d = Precision::Direct { truncation: 2000 };
        prop_assert_eq!(gram_entry(j, k, d).unwrap(), gram_entry(k, j, d).unwrap());
    }
}

/// Fitted constant for `residual_h2^2 <= c (|R|^2 + m^2 K^{-1/2})`; the largest
/// observed ratio (m = 1, K = 10) is 0.185.
const BOUND_SHAPE_CONSTANT: f64 = 0.25;

#[test]
fn residual_has_the_bound_shape() {
    for m in 1..=3u64 {
        for k in [10, 30, 100, 300, 1000] {
            let r = theorem11_residual(m, k, 100_000).unwrap();
            let ratio = r.residual_h2.powi(2) / r.bound;
            assert!(ratio <= BOUND_SHAPE_CONSTANT, "m={m} K={k}: ratio {ratio}");
            assert!(r.residual_a21 <= 2f64.sqrt() * r.residual_h2);
        }
    }
}
