//! Numerical equivalence of the three factorial-moment routes: the
//! alternating finite sum, the ordered-simplex integral of
//! `prod_i theta_i^(xi_i)`, and the closed-form gamma-ratio telescope.

use serde::Serialize;

use crate::model::ModelParams;
use crate::ness::simplex::{simplex_product_expectation, SimplexMethod};
use crate::ness::{factorial_moment, factorial_moment_closed};
use crate::Result;

/// All three evaluations of one `G(xi)` with their pairwise differences.
#[derive(Debug, Clone, Serialize)]
pub struct AppendixReport {
    pub xi: Vec<u64>,
    /// alternating finite sum over configurations below `xi`
    pub moment_sum: f64,
    /// ordered-simplex integral of the potential powers
    pub integral: f64,
    /// closed-form gamma-ratio route
    pub closed_form: f64,
    pub max_abs_gap: f64,
}

/// Evaluate `G(xi)` by all three routes.
pub fn appendix_check(params: &ModelParams, xi: &[u64], nodes: usize) -> Result<AppendixReport> {
    let moment_sum = factorial_moment(params, xi);
    let closed_form = factorial_moment_closed(params, xi);
    let (rho_l, width) = (params.rho_left(), params.rho_right() - params.rho_left());
    let integral = if width == 0.0 {
        xi.iter()
            .map(|&x| rho_l.powi(x as i32))
            .product()
    } else {
        simplex_product_expectation(
            params.s(),
            params.n_sites(),
            nodes,
            SimplexMethod::TensorBeta,
            |i, u| (rho_l + width * u).powi(xi[i] as i32),
        )?
    };
    let max_abs_gap = (moment_sum - integral)
        .abs()
        .max((moment_sum - closed_form).abs())
        .max((integral - closed_form).abs());
    Ok(AppendixReport {
        xi: xi.to_vec(),
        moment_sum,
        integral,
        closed_form,
        max_abs_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zeroth_moment_all_routes_one() {
        let p = ModelParams::new(0.65, 3, 0.2, 0.8).unwrap();
        let r = appendix_check(&p, &[0, 0, 0], 24).unwrap();
        assert_relative_eq!(r.moment_sum, 1.0, epsilon = 1e-13);
        assert_relative_eq!(r.integral, 1.0, epsilon = 1e-12);
        assert_relative_eq!(r.closed_form, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn single_site_second_moment_is_third() {
        // N=1, s=1/2, rho=(0,1): G(2) = int_0^1 theta^2 dtheta = 1/3
        let p = ModelParams::new(0.5, 1, 0.0, 1.0).unwrap();
        let r = appendix_check(&p, &[2], 24).unwrap();
        assert_relative_eq!(r.moment_sum, 1.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(r.integral, 1.0 / 3.0, max_relative = 1e-12);
        assert!(r.max_abs_gap < 1e-12);
    }

    #[test]
    fn triangle_tight_for_integer_two_s() {
        let p = ModelParams::new(1.0, 2, 0.23, 0.71).unwrap();
        for xi in [[1u64, 2], [3, 1], [2, 4]] {
            let r = appendix_check(&p, &xi, 32).unwrap();
            assert!(r.max_abs_gap < 1e-9, "gap {} at {:?}", r.max_abs_gap, xi);
        }
    }
}
