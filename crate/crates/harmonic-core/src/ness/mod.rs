//! Exact non-equilibrium steady state.
//!
//! The steady state is accessed three ways, all agreeing on overlap:
//!
//! * scaled factorial moments `G(xi)` as a finite alternating sum over
//!   configurations below `xi` ([`factorial_moment`]);
//! * reconstruction of `mu(eta)` from the moments by a truncated
//!   alternating sum ([`recon`]), the validation route;
//! * the mixture representation over ordered Dirichlet chemical potentials
//!   ([`mixture`]), the primary route (positive integrand, absolutely
//!   convergent).

pub mod equivalence;
pub mod mixture;
pub mod recon;
pub mod simplex;

pub use equivalence::{appendix_check, AppendixReport};
pub use mixture::{
    marginal_distribution, mixture_probability, mixture_probability_mc, sample_mixture,
    MixtureDraw,
};
pub use recon::NessReconstruction;
pub use simplex::{simplex_product_expectation, SimplexMethod};

use crate::model::ModelParams;
use crate::numerics::special::{binomial, gamma_ratio, ln_gamma};
use crate::numerics::summation::NeumaierSum;

/// Weight `f_i(eta)` entering the factorial-moment formula: the product
/// over `j <= eta_i` of `(2s(N+1-i) - j + Ntail) / (2s(N+1) - j + Ntail)`
/// with `Ntail` the tail occupation sum from site `i`.
///
/// `site` is 1-based. Large `eta_i` evaluates as a gamma-ratio telescope.
pub fn f_weight(params: &ModelParams, site: usize, eta: &[u64]) -> f64 {
    debug_assert!((1..=params.n_sites()).contains(&site));
    let two_s = params.two_s();
    let n = params.n_sites() as f64;
    let m = eta[site - 1];
    let tail: u64 = eta[site - 1..].iter().sum();
    let a = two_s * (n + 1.0 - site as f64) + tail as f64;
    let b = two_s * (n + 1.0) + tail as f64;
    if m == 0 {
        return 1.0;
    }
    if m > 25 {
        // prod_{j=1..m} (a-j)/(b-j) = [G(a)/G(a-m)] / [G(b)/G(b-m)]
        let mf = m as f64;
        return (ln_gamma(a) - ln_gamma(a - mf) - ln_gamma(b) + ln_gamma(b - mf)).exp();
    }
    let mut acc = 1.0;
    for j in 1..=m {
        acc *= (a - j as f64) / (b - j as f64);
    }
    acc
}

/// Product `prod_i f_i(eta)`.
pub fn f_weight_product(params: &ModelParams, eta: &[u64]) -> f64 {
    (1..=params.n_sites())
        .map(|i| f_weight(params, i, eta))
        .product()
}

/// The same product through the closed-form gamma-ratio telescope; an
/// algebraically independent evaluation path used by the equivalence
/// report.
pub fn f_weight_product_closed(params: &ModelParams, eta: &[u64]) -> f64 {
    let two_s = params.two_s();
    let n = params.n_sites() as f64;
    let total: u64 = eta.iter().sum();
    let mut lg = ln_gamma(two_s * (n + 1.0)) - ln_gamma(two_s * (n + 1.0) + total as f64);
    let mut tail: u64 = total;
    for (k, &e) in eta.iter().enumerate() {
        let a = two_s * (n - k as f64);
        lg += ln_gamma(a + tail as f64) - ln_gamma(a + (tail - e) as f64);
        tail -= e;
    }
    lg.exp()
}

/// Scaled factorial moment `G(xi)` of the steady state, as the finite sum
/// over `eta <= xi` with binomial coefficients and signs, accumulated with
/// compensated summation.
pub fn factorial_moment(params: &ModelParams, xi: &[u64]) -> f64 {
    factorial_moment_with(params, xi, f_weight_product)
}

/// `G(xi)` through the closed-form weight.
pub fn factorial_moment_closed(params: &ModelParams, xi: &[u64]) -> f64 {
    factorial_moment_with(params, xi, f_weight_product_closed)
}

fn factorial_moment_with(
    params: &ModelParams,
    xi: &[u64],
    weight: impl Fn(&ModelParams, &[u64]) -> f64,
) -> f64 {
    assert_eq!(xi.len(), params.n_sites());
    let (rho_l, rho_r) = (params.rho_left(), params.rho_right());
    let diff = rho_l - rho_r;
    let mut eta = vec![0u64; xi.len()];
    let mut sum = NeumaierSum::new();
    loop {
        let mut coeff = 1.0;
        for (&x, &e) in xi.iter().zip(eta.iter()) {
            coeff *= binomial(x, e) * rho_r.powi((x - e) as i32) * diff.powi(e as i32);
        }
        if coeff != 0.0 {
            sum.add(coeff * weight(params, &eta));
        }
        // next multi-index below xi
        let mut k = 0;
        loop {
            if k == xi.len() {
                return sum.value();
            }
            if eta[k] < xi[k] {
                eta[k] += 1;
                break;
            }
            eta[k] = 0;
            k += 1;
        }
    }
}

/// Mean occupation profile predicted by the moments: `G(delta^i)` is
/// affine in the site index, `rho_l + (rho_r - rho_l) i/(N+1)`.
pub fn mean_profile(params: &ModelParams) -> Vec<f64> {
    (1..=params.n_sites())
        .map(|i| {
            let mut xi = vec![0u64; params.n_sites()];
            xi[i - 1] = 1;
            factorial_moment(params, &xi)
        })
        .collect()
}

/// Reconstruction weight `(-1)^(x-e) C(x,e) Gamma(2s+x)/(Gamma(2s) x!)`
/// pairing the moments back into probabilities.
pub(crate) fn reconstruction_coefficient(two_s: f64, e: u64, x: u64) -> f64 {
    if x < e {
        return 0.0;
    }
    let sign = if (x - e).is_multiple_of(2) { 1.0 } else { -1.0 };
    let xf = x as f64;
    sign * binomial(x, e) * (ln_gamma(two_s + xf) - ln_gamma(two_s) - ln_gamma(xf + 1.0)).exp()
}

/// Gamma-ratio normalizer of the scaled factorial moments,
/// `Gamma(2s)/Gamma(2s+k)` against plain falling factorials.
pub fn moment_scale(two_s: f64, k: u64) -> f64 {
    gamma_ratio(two_s, two_s + k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(s: f64, n: usize, rl: f64, rr: f64) -> ModelParams {
        ModelParams::new(s, n, rl, rr).unwrap()
    }

    #[test]
    fn f_weight_empty_site_is_one() {
        let p = params(0.7, 3, 0.1, 0.9);
        assert_eq!(f_weight(&p, 2, &[4, 0, 1]), 1.0);
    }

    #[test]
    fn f_weight_single_site_single_particle() {
        // N=1, eta=(1): f_1 = 2s/(4s) = 1/2 for any s
        for &s in &[0.5, 1.0, 1.3] {
            let p = params(s, 1, 0.0, 1.0);
            assert_relative_eq!(f_weight(&p, 1, &[1]), 0.5, max_relative = 1e-14);
        }
    }

    #[test]
    fn f_weight_telescoping_product() {
        let p = params(0.65, 3, 0.2, 0.8);
        for eta in [[0u64, 0, 0], [1, 2, 0], [3, 1, 4], [2, 2, 2]] {
            assert_relative_eq!(
                f_weight_product(&p, &eta),
                f_weight_product_closed(&p, &eta),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn f_weight_large_occupation_gamma_path() {
        let p = params(0.9, 2, 0.0, 1.0);
        // compare the gamma-telescope branch (m > 25) against the direct product
        let eta = [40u64, 3];
        let direct: f64 = {
            let two_s = p.two_s();
            let tail = 43.0;
            let a = two_s * 2.0 + tail;
            let b = two_s * 3.0 + tail;
            (1..=40).map(|j| (a - j as f64) / (b - j as f64)).product()
        };
        assert_relative_eq!(f_weight(&p, 1, &eta), direct, max_relative = 1e-11);
    }

    #[test]
    fn zeroth_moment_is_one() {
        let p = params(0.65, 3, 0.2, 0.8);
        assert_relative_eq!(factorial_moment(&p, &[0, 0, 0]), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn first_moment_single_site_example() {
        // N=1, s=1/2, rho=(0,1): G(1) = rho_r + (rho_l-rho_r) f_1((1)) = 1 - 1/2
        let p = params(0.5, 1, 0.0, 1.0);
        assert_relative_eq!(factorial_moment(&p, &[1]), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn mean_profile_is_affine() {
        for &s in &[0.5, 1.0, 0.65] {
            for n in 1..=8usize {
                let p = params(s, n, 0.2, 0.8);
                let profile = mean_profile(&p);
                for (i, &g) in profile.iter().enumerate() {
                    let want = 0.2 + 0.6 * (i + 1) as f64 / (n + 1) as f64;
                    assert_relative_eq!(g, want, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn equilibrium_moments_are_powers() {
        // rho_l = rho_r = rho: G(xi) = rho^|xi|
        let p = params(1.0, 2, 0.7, 0.7);
        for xi in [[0u64, 1], [2, 0], [1, 3]] {
            let total: u64 = xi.iter().sum();
            assert_relative_eq!(
                factorial_moment(&p, &xi),
                0.7f64.powi(total as i32),
                max_relative = 1e-13
            );
        }
    }
}
