//! Property tests for the invariants of the numeric layers.

use std::f64::consts::PI;

use fourier_bounds::asymptotics::{n0_condition, n1_condition, sigma_xi, threshold_n0, threshold_n1};
use fourier_bounds::bounds::{best_constant_deviation, sandwich, upper_bound};
use fourier_bounds::kernel::tail_sum;
use fourier_bounds::norms::{j_s, j_s_limit, periodic_ls_norm};
use fourier_bounds::specfun::{beta_fn, elliptic_k, gamma_fn};
use fourier_bounds::{KernelParams, ModulatedSeries, NormOrder, QuadratureConfig, TruncationIndex};
use proptest::prelude::*;

fn idx(n: u64) -> TruncationIndex {
    TruncationIndex::new(n).unwrap()
}

fn order() -> impl Strategy<Value = NormOrder> {
    prop_oneof![
        Just(NormOrder::Finite(1.0)),
        Just(NormOrder::Finite(1.5)),
        Just(NormOrder::Finite(2.0)),
        Just(NormOrder::Finite(4.0)),
        Just(NormOrder::Infinity),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_recurrence(x in 0.05f64..20.0) {
        let lhs = gamma_fn(x + 1.0).unwrap();
        let rhs = x * gamma_fn(x).unwrap();
        prop_assert!(((lhs - rhs) / rhs).abs() < 1e-12);
    }

    #[test]
    fn beta_is_symmetric(x in 0.05f64..10.0, y in 0.05f64..10.0) {
        let a = beta_fn(x, y).unwrap();
        let b = beta_fn(y, x).unwrap();
        prop_assert!(((a - b) / a).abs() < 1e-13);
    }

    #[test]
    fn elliptic_k_increases(q in 0.0f64..0.98, dq in 1e-4f64..0.01) {
        prop_assert!(elliptic_k(q + dq).unwrap() > elliptic_k(q).unwrap());
    }

    #[test]
    fn tail_sum_peels_leading_term(alpha in 0.3f64..3.0, r in 0.3f64..2.0, n in 1u64..200) {
        let p = KernelParams::new(alpha, r, 0.0).unwrap();
        let head = tail_sum(&p, idx(n), 1.0).unwrap();
        let rest = tail_sum(&p, idx(n + 1), 1.0).unwrap();
        let rebuilt = 1.0 + rest.rescaled(head.log_scale);
        prop_assert!(((rebuilt - head.scaled) / head.scaled).abs() < 1e-13);
    }

    #[test]
    fn j_s_increases_below_limit(v in 0.1f64..1e4, s in 1.2f64..6.0) {
        let s = NormOrder::Finite(s);
        let a = j_s(v, s).unwrap();
        let b = j_s(2.0 * v, s).unwrap();
        let limit = j_s_limit(s).unwrap();
        prop_assert!(a <= b);
        // strict once the increment is above rounding
        if limit - a > 1e-12 * limit {
            prop_assert!(a < b);
        }
        prop_assert!(b <= limit);
    }

    #[test]
    fn thresholds_are_minimal(alpha in 0.5f64..3.0, r in 0.3f64..0.8, p in order()) {
        let (Ok(n0), Ok(n1)) = (threshold_n0(alpha, r, p), threshold_n1(alpha, r)) else {
            // beyond the search range; reported as overflow
            return Err(TestCaseError::reject("threshold out of range"));
        };
        prop_assert!(n0_condition(alpha, r, p, n0));
        prop_assert!(n0 == 1 || !n0_condition(alpha, r, p, n0 - 1));
        prop_assert!(n1_condition(alpha, r, n1));
        prop_assert!(!n1_condition(alpha, r, n1 - 1));
        prop_assert!(n1 > threshold_n0(alpha, r, NormOrder::Finite(1.0)).unwrap());
    }

    #[test]
    fn sigma_and_xi_take_their_two_values(s in order()) {
        let sx = sigma_xi(s);
        prop_assert!(sx.sigma == 1 || sx.sigma == 2);
        prop_assert!(sx.xi <= 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn parseval_on_grid(alpha in 0.5f64..3.0, r in 0.4f64..1.0, n in 1u64..64) {
        let p = KernelParams::new(alpha, r, 0.7).unwrap();
        let series = ModulatedSeries::kernel_tail(&p, idx(n)).unwrap();
        let norm = periodic_ls_norm(&series, NormOrder::Finite(2.0), &QuadratureConfig::default()).unwrap();
        let ts = tail_sum(&p, idx(n), 2.0).unwrap();
        prop_assert!(((norm * norm / PI - ts.scaled) / ts.scaled).abs() < 1e-9);
    }

    #[test]
    fn normalized_norm_grows_with_s(alpha in 0.5f64..3.0, r in 0.4f64..1.0, n in 1u64..32, beta in 0.0f64..4.0) {
        let p = KernelParams::new(alpha, r, beta).unwrap();
        let series = ModulatedSeries::kernel_tail(&p, idx(n)).unwrap();
        let cfg = QuadratureConfig::default();
        let mean = |s: f64| periodic_ls_norm(&series, NormOrder::Finite(s), &cfg).unwrap() * (2.0 * PI).powf(-1.0 / s);
        let (m1, m2, m4) = (mean(1.0), mean(2.0), mean(4.0));
        prop_assert!(m1 <= m2 * (1.0 + 1e-9));
        prop_assert!(m2 <= m4 * (1.0 + 1e-9));
    }

    #[test]
    fn upper_s2_decreases_in_n(alpha in 0.5f64..3.0, r in 0.4f64..1.0, n in 1u64..100) {
        let p = KernelParams::new(alpha, r, 0.0).unwrap();
        let cfg = QuadratureConfig::default();
        let a = upper_bound(&p, idx(n), NormOrder::Finite(2.0), &cfg).unwrap();
        let b = upper_bound(&p, idx(n + 1), NormOrder::Finite(2.0), &cfg).unwrap();
        prop_assert!(b.rescaled(a.log_scale) < a.scaled);
    }

    #[test]
    fn sandwich_is_ordered(alpha in 0.5f64..3.0, r in 0.4f64..0.9, beta in 0.0f64..4.0, n in 2u64..48, s in order()) {
        let p = KernelParams::new(alpha, r, beta).unwrap();
        let b = sandwich(&p, idx(n), s, &QuadratureConfig::default()).unwrap();
        prop_assert!(b.lower <= b.upper * (1.0 + 1e-9));
        prop_assert!(b.best_constant <= b.upper * (1.0 + 1e-12));
        prop_assert!(b.lower > 0.0);
    }

    #[test]
    fn best_constant_never_exceeds_upper(alpha in 0.5f64..3.0, r in 0.4f64..0.9, beta in 0.0f64..4.0, n in 2u64..32) {
        let p = KernelParams::new(alpha, r, beta).unwrap();
        let cfg = QuadratureConfig::default();
        let s = NormOrder::Finite(1.5);
        let (bc, _) = best_constant_deviation(&p, idx(n), s, &cfg).unwrap();
        let up = upper_bound(&p, idx(n), s, &cfg).unwrap();
        prop_assert!(bc.scaled <= up.scaled * (1.0 + 1e-12));
    }
}
