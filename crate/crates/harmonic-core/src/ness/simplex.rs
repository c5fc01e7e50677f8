//! Expectations over the ordered Dirichlet law on the simplex
//! `0 <= u_1 <= ... <= u_N <= 1` with gap density
//! `prod_{i=1}^{N+1} (u_i - u_{i-1})^(2s-1)` (conventions `u_0 = 0`,
//! `u_{N+1} = 1`).
//!
//! Two evaluation routes for separable integrands `prod_i g_i(u_i)`:
//!
//! * `TensorBeta` — the substitution `u_i = 1 - t_1 ... t_i` turns the
//!   ordered integral into independent Beta(2s(N+1-i), 2s) coordinates, so
//!   a tensor product of normalized Gauss–Jacobi rules applies;
//! * `NestedJacobi` — direct recursion over the nested integrals, each
//!   layer using a Gauss–Jacobi rule whose right-endpoint exponent matches
//!   the known vanishing rate of the inner integral.
//!
//! Both are spectrally accurate for fractional `2s - 1` because the gap
//! weights are built into the quadrature nodes.

use crate::numerics::quadrature::cached_jacobi01;
use crate::{Error, Result};

/// Evaluation route for the ordered-simplex expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexMethod {
    TensorBeta,
    NestedJacobi,
}

/// Hard cap on the nesting dimension; beyond this use Monte Carlo.
pub const MAX_QUADRATURE_DIM: usize = 6;

/// `E[prod_i factor(i, u_i)]` under the ordered Dirichlet law.
///
/// `factor(i, u)` is the i-th coordinate factor (0-based) evaluated at
/// `u in [0, 1]`.
pub fn simplex_product_expectation<F>(
    s: f64,
    n_sites: usize,
    nodes: usize,
    method: SimplexMethod,
    factor: F,
) -> Result<f64>
where
    F: Fn(usize, f64) -> f64 + Copy,
{
    if n_sites > MAX_QUADRATURE_DIM {
        return Err(Error::domain(format!(
            "nested quadrature limited to N <= {MAX_QUADRATURE_DIM}, got N = {n_sites}; use the Monte Carlo route"
        )));
    }
    match method {
        SimplexMethod::TensorBeta => tensor_beta(s, n_sites, nodes, factor),
        SimplexMethod::NestedJacobi => nested_jacobi(s, n_sites, nodes, factor),
    }
}

/// Same expectation with an empirical error estimate from one refinement.
pub fn simplex_product_expectation_refined<F>(
    s: f64,
    n_sites: usize,
    nodes: usize,
    method: SimplexMethod,
    factor: F,
) -> Result<(f64, f64)>
where
    F: Fn(usize, f64) -> f64 + Copy,
{
    let coarse = simplex_product_expectation(s, n_sites, nodes, method, factor)?;
    let fine = simplex_product_expectation(s, n_sites, nodes + 8, method, factor)?;
    Ok((fine, (fine - coarse).abs()))
}

fn tensor_beta<F>(s: f64, n_sites: usize, nodes: usize, factor: F) -> Result<f64>
where
    F: Fn(usize, f64) -> f64 + Copy,
{
    let two_s = 2.0 * s;
    let rules: Vec<_> = (1..=n_sites)
        .map(|i| {
            let a = two_s * (n_sites as f64 + 1.0 - i as f64);
            cached_jacobi01(nodes, a, two_s)
        })
        .collect::<Result<_>>()?;
    // normalize each axis to a Beta expectation
    let totals: Vec<f64> = rules
        .iter()
        .map(|r| r.weights.iter().sum::<f64>())
        .collect();

    fn rec<F>(
        axis: usize,
        prod_t: f64,
        acc: f64,
        rules: &[std::sync::Arc<crate::numerics::quadrature::GaussRule>],
        totals: &[f64],
        factor: F,
    ) -> f64
    where
        F: Fn(usize, f64) -> f64 + Copy,
    {
        if axis == rules.len() {
            return acc;
        }
        let rule = &rules[axis];
        let mut sum = 0.0;
        for (&t, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
            let pt = prod_t * t;
            let u = 1.0 - pt;
            let f = factor(axis, u);
            if f != 0.0 || axis + 1 < rules.len() {
                sum += w / totals[axis] * rec(axis + 1, pt, acc * f, rules, totals, factor);
            }
        }
        sum
    }
    Ok(rec(0, 1.0, 1.0, &rules, &totals, factor))
}

fn nested_jacobi<F>(s: f64, n_sites: usize, nodes: usize, factor: F) -> Result<f64>
where
    F: Fn(usize, f64) -> f64 + Copy,
{
    let two_s = 2.0 * s;
    // layer i (0-based) integrates with weight w^(2s-1) (1-w)^(2s(N-i)-1)
    let rules: Vec<_> = (0..n_sites)
        .map(|i| cached_jacobi01(nodes, two_s, two_s * (n_sites - i) as f64))
        .collect::<Result<_>>()?;

    fn layer<F>(
        i: usize,
        u_prev: f64,
        rules: &[std::sync::Arc<crate::numerics::quadrature::GaussRule>],
        factor: Option<F>,
    ) -> f64
    where
        F: Fn(usize, f64) -> f64 + Copy,
    {
        if i == rules.len() {
            return 1.0;
        }
        let rule = &rules[i];
        let mut sum = 0.0;
        for (&w, &wt) in rule.nodes.iter().zip(rule.weights.iter()) {
            let u = u_prev + (1.0 - u_prev) * w;
            let g = match factor {
                Some(f) => f(i, u),
                None => 1.0,
            };
            if g != 0.0 {
                sum += wt * g * layer(i + 1, u, rules, factor);
            }
        }
        sum
    }
    // normalize against the same recursion with unit factors so no gamma
    // prefactors are needed
    let num = layer(0, 0.0, &rules, Some(factor));
    let den = layer::<F>(0, 0.0, &rules, None);
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn normalization_is_one() {
        for &method in &[SimplexMethod::TensorBeta, SimplexMethod::NestedJacobi] {
            for &(s, n) in &[(0.5, 1usize), (1.0, 3), (0.65, 4)] {
                let v = simplex_product_expectation(s, n, 24, method, |_, _| 1.0).unwrap();
                assert_relative_eq!(v, 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn coordinate_means_are_order_statistics_means() {
        // E[u_i] = i/(N+1) for the every-2s order statistics of uniforms
        for &method in &[SimplexMethod::TensorBeta, SimplexMethod::NestedJacobi] {
            for &(s, n) in &[(1.0, 3usize), (0.5, 4), (1.5, 2)] {
                for site in 0..n {
                    let v = simplex_product_expectation(s, n, 28, method, |i, u| {
                        if i == site {
                            u
                        } else {
                            1.0
                        }
                    })
                    .unwrap();
                    let want = (site + 1) as f64 / (n + 1) as f64;
                    assert_relative_eq!(v, want, max_relative = 1e-11);
                }
            }
        }
    }

    #[test]
    fn routes_agree_on_generic_integrand() {
        let f = |i: usize, u: f64| (1.0 + 0.3 * (i as f64 + 1.0) * u).recip();
        for &(s, n) in &[(0.5, 3usize), (1.3, 3), (1.0, 4)] {
            let a = simplex_product_expectation(s, n, 32, SimplexMethod::TensorBeta, f).unwrap();
            let b = simplex_product_expectation(s, n, 32, SimplexMethod::NestedJacobi, f).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-11);
        }
    }

    #[test]
    fn refinement_reports_small_error_for_smooth_factors() {
        let (v, err) = simplex_product_expectation_refined(
            0.75,
            3,
            24,
            SimplexMethod::TensorBeta,
            |_, u| (0.2 + 0.6 * u).powi(2),
        )
        .unwrap();
        assert!(err < 1e-12 * v.abs().max(1.0), "err {err}");
    }

    #[test]
    fn dimension_guard() {
        let r = simplex_product_expectation(0.5, 7, 8, SimplexMethod::TensorBeta, |_, _| 1.0);
        assert!(r.is_err());
    }
}
