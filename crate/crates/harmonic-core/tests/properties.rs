//! Property tests for the structural invariants.

use proptest::prelude::*;

use harmonic_core::mgf::{c_map, mgf, FieldVector, MgfMethod};
use harmonic_core::model::negbin::{negbin_mgf, negbin_pmf};
use harmonic_core::model::rates::{jump_rate, total_exit_rate};
use harmonic_core::model::ModelParams;
use harmonic_core::ness::{f_weight_product, f_weight_product_closed, factorial_moment};
use harmonic_core::numerics::quadrature::GaussRule;
use harmonic_core::numerics::special::ln_beta;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jump_rates_sum_to_shifted_harmonic(s in 0.1f64..4.0, n in 1u64..150) {
        let direct: f64 = (1..=n).map(|k| jump_rate(s, k, n)).sum();
        let target = total_exit_rate(s, n);
        prop_assert!((direct - target).abs() <= 1e-12 * target);
    }

    #[test]
    fn negbin_normalizes_with_correct_mean(s in 0.2f64..3.0, theta in 0.01f64..3.0) {
        let cap = (60.0 * (1.0 + theta)) as u64;
        let mut total = 0.0;
        let mut mean = 0.0;
        for n in 0..=cap {
            let p = negbin_pmf(s, theta, n);
            prop_assert!(p >= 0.0);
            total += p;
            mean += n as f64 * p;
        }
        prop_assert!((total - 1.0).abs() < 1e-8);
        prop_assert!((mean - 2.0 * s * theta).abs() < 1e-6 * (1.0 + 2.0 * s * theta));
    }

    #[test]
    fn negbin_mgf_matches_truncated_series(s in 0.2f64..2.0, theta in 0.05f64..2.0, frac in 0.05f64..0.8) {
        // h strictly inside the domain
        let h = frac * (1.0 + 1.0 / theta).ln() * 0.9 - 0.5;
        let mgf_value = negbin_mgf(s, theta, h).unwrap();
        let mut series = 0.0;
        for n in 0..4000u64 {
            let p = negbin_pmf(s, theta, n);
            if p == 0.0 && n > 0 {
                break;
            }
            series += (h * n as f64).exp() * p;
        }
        prop_assert!((mgf_value - series).abs() < 1e-7 * mgf_value);
    }

    #[test]
    fn quadrature_reproduces_beta_moments(a in 0.2f64..6.0, b in 0.2f64..6.0, k in 0u32..8) {
        let rule = GaussRule::jacobi01(20, a, b).unwrap();
        let got = rule.integrate(|x| x.powi(k as i32));
        let want = ln_beta(a + k as f64, b).exp();
        prop_assert!((got - want).abs() < 1e-11 * want.abs());
    }

    #[test]
    fn moment_weights_agree_between_routes(
        s in 0.3f64..2.0,
        eta in proptest::collection::vec(0u64..6, 1..5),
    ) {
        let params = ModelParams::new(s, eta.len(), 0.1, 0.9).unwrap();
        let a = f_weight_product(&params, &eta);
        let b = f_weight_product_closed(&params, &eta);
        prop_assert!((a - b).abs() <= 1e-11 * a.abs().max(1e-30));
    }

    #[test]
    fn moments_are_bounded_by_density_power(
        two_s in 1u64..4,
        xi in proptest::collection::vec(0u64..5, 1..4),
    ) {
        // 0 <= G(xi) <= rho_r^{|xi|} since G is a mixture moment of theta <= rho_r
        let params = ModelParams::new(two_s as f64 / 2.0, xi.len(), 0.2, 0.7).unwrap();
        let g = factorial_moment(&params, &xi);
        let total: u64 = xi.iter().sum();
        prop_assert!(g >= -1e-12);
        prop_assert!(g <= 0.7f64.powi(total as i32) * (1.0 + 1e-9));
    }

    #[test]
    fn equilibrium_mgf_factorizes(rho in 0.05f64..1.5, h1 in -0.5f64..0.1, h2 in -0.5f64..0.1) {
        let params = ModelParams::new(0.5, 2, rho, rho).unwrap();
        let field = FieldVector::new(&params, vec![h1, h2]).unwrap();
        let joint = mgf(&params, &field, MgfMethod::Mixture { nodes: 16 }).unwrap();
        let product = negbin_mgf(0.5, rho, h1).unwrap() * negbin_mgf(0.5, rho, h2).unwrap();
        prop_assert!((joint - product).abs() < 1e-10 * product);
    }

    #[test]
    fn c_map_is_zero_only_at_zero_field(h in -1.0f64..0.4) {
        let params = ModelParams::new(0.5, 1, 0.2, 0.8).unwrap();
        let c = c_map(&params, &[h]).unwrap()[0];
        if h == 0.0 {
            prop_assert_eq!(c, 0.0);
        } else {
            prop_assert!(c.abs() > 0.0);
            // same sign convention as 1 - e^h
            prop_assert_eq!(c > 0.0, h < 0.0);
            prop_assert!(c < 1.0);
        }
    }
}
