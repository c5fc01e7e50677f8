//! Mixture representation of the steady state: an average of inhomogeneous
//! Negative-Binomial product measures over ordered random chemical
//! potentials `rho_l <= theta_1 <= ... <= theta_N <= rho_r` whose gaps are
//! symmetric-Dirichlet(2s) distributed.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;

use crate::model::negbin::{negbin_pmf, negbin_sample};
use crate::model::ModelParams;
use crate::ness::simplex::{
    simplex_product_expectation_refined, SimplexMethod, MAX_QUADRATURE_DIM,
};
use crate::numerics::quadrature::GaussRule;
use crate::{Error, Result};

/// One draw of the mixing law: the ordered chemical potentials and a
/// configuration sampled from the corresponding product measure.
#[derive(Debug, Clone, Serialize)]
pub struct MixtureDraw {
    pub thetas: Vec<f64>,
    pub eta: Vec<u64>,
}

/// Steady-state probability of `eta` through the mixture integral.
///
/// Returns `(value, error_estimate)`. Equilibrium parameters short-circuit
/// to the product measure (the mixing law degenerates to a point).
pub fn mixture_probability(
    params: &ModelParams,
    eta: &[u64],
    nodes: usize,
    method: SimplexMethod,
) -> Result<(f64, f64)> {
    assert_eq!(eta.len(), params.n_sites());
    if params.is_equilibrium() {
        let p = eta
            .iter()
            .map(|&n| negbin_pmf(params.s(), params.rho_left(), n))
            .product();
        return Ok((p, 0.0));
    }
    let (rho_l, width) = (params.rho_left(), params.rho_right() - params.rho_left());
    let s = params.s();
    simplex_product_expectation_refined(s, params.n_sites(), nodes, method, |i, u| {
        negbin_pmf(s, rho_l + width * u, eta[i])
    })
}

/// Monte Carlo estimate of the mixture probability with its standard error;
/// the fallback beyond the quadrature dimension guard.
pub fn mixture_probability_mc<R: Rng + ?Sized>(
    params: &ModelParams,
    eta: &[u64],
    draws: usize,
    rng: &mut R,
) -> (f64, f64) {
    assert_eq!(eta.len(), params.n_sites());
    let s = params.s();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..draws {
        let thetas = sample_potentials(params, rng);
        let p: f64 = thetas
            .iter()
            .zip(eta.iter())
            .map(|(&th, &n)| negbin_pmf(s, th, n))
            .product();
        sum += p;
        sum_sq += p * p;
    }
    let mean = sum / draws as f64;
    let var = (sum_sq / draws as f64 - mean * mean).max(0.0);
    (mean, (var / draws as f64).sqrt())
}

/// Decide quadrature vs Monte Carlo by the dimension guard.
pub fn mixture_probability_auto<R: Rng + ?Sized>(
    params: &ModelParams,
    eta: &[u64],
    nodes: usize,
    mc_draws: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if params.n_sites() <= MAX_QUADRATURE_DIM {
        mixture_probability(params, eta, nodes, SimplexMethod::TensorBeta)
    } else {
        Ok(mixture_probability_mc(params, eta, mc_draws, rng))
    }
}

fn sample_potentials<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Vec<f64> {
    let n = params.n_sites();
    let gamma = Gamma::new(params.two_s(), 1.0).expect("2s > 0");
    let gaps: Vec<f64> = (0..=n).map(|_| gamma.sample(rng)).collect();
    let total: f64 = gaps.iter().sum();
    let width = params.rho_right() - params.rho_left();
    let mut acc = 0.0;
    gaps[..n]
        .iter()
        .map(|&g| {
            acc += g;
            params.rho_left() + width * acc / total
        })
        .collect()
}

/// Draw ordered potentials from the symmetric Dirichlet(2s) gap law (via
/// normalized Gamma variates) and a configuration from the attached
/// Negative-Binomial product measure.
pub fn sample_mixture<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> MixtureDraw {
    let thetas = sample_potentials(params, rng);
    let eta = thetas
        .iter()
        .map(|&th| negbin_sample(params.s(), th, rng))
        .collect();
    MixtureDraw { thetas, eta }
}

/// Single-site marginal `P(eta_i = m)` for `m = 0..=cap` by 1-D quadrature
/// against the Beta(2si, 2s(N+1-i)) law of the i-th potential (`site` is
/// 1-based), refined until stable or `max_nodes` is reached.
pub fn marginal_distribution(
    params: &ModelParams,
    site: usize,
    cap: u64,
    tol: f64,
) -> Result<Vec<f64>> {
    if !(1..=params.n_sites()).contains(&site) {
        return Err(Error::domain(format!(
            "site {site} out of range 1..={}",
            params.n_sites()
        )));
    }
    let s = params.s();
    if params.is_equilibrium() {
        return Ok((0..=cap)
            .map(|m| negbin_pmf(s, params.rho_left(), m))
            .collect());
    }
    let two_s = params.two_s();
    let a = two_s * site as f64;
    let b = two_s * (params.n_sites() - site + 1) as f64;
    let (rho_l, width) = (params.rho_left(), params.rho_right() - params.rho_left());

    let eval = |nodes: usize| -> Result<Vec<f64>> {
        let rule = GaussRule::beta_expectation(nodes, a, b)?;
        Ok((0..=cap)
            .map(|m| rule.integrate(|u| negbin_pmf(s, rho_l + width * u, m)))
            .collect())
    };
    let mut nodes = 24;
    let mut coarse = eval(nodes)?;
    loop {
        let fine = eval(nodes + 12)?;
        let err = coarse
            .iter()
            .zip(fine.iter())
            .map(|(&c, &f)| (c - f).abs())
            .fold(0.0f64, f64::max);
        if err < tol {
            return Ok(fine);
        }
        if nodes >= 160 {
            return Err(Error::QuadratureNonConvergence {
                estimate: err,
                tol,
            });
        }
        coarse = fine;
        nodes += 24;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(s: f64, n: usize, rl: f64, rr: f64) -> ModelParams {
        ModelParams::new(s, n, rl, rr).unwrap()
    }

    #[test]
    fn single_site_empty_probability_is_log_two() {
        // N=1, s=1/2, rho=(0,1): mu(0) = int_0^1 dθ/(1+θ) = log 2
        let p = params(0.5, 1, 0.0, 1.0);
        let (v, err) = mixture_probability(&p, &[0], 32, SimplexMethod::TensorBeta).unwrap();
        assert_relative_eq!(v, std::f64::consts::LN_2, max_relative = 1e-12);
        assert!(err < 1e-12);
    }

    #[test]
    fn equilibrium_collapses_to_product() {
        let p = params(1.0, 3, 0.5, 0.5);
        let (v, _) = mixture_probability(&p, &[1, 0, 2], 16, SimplexMethod::TensorBeta).unwrap();
        let want: f64 = [1u64, 0, 2]
            .iter()
            .map(|&n| negbin_pmf(1.0, 0.5, n))
            .product();
        assert_relative_eq!(v, want, epsilon = 1e-15);
    }

    #[test]
    fn quadrature_routes_agree() {
        let p = params(0.65, 3, 0.2, 0.8);
        for eta in [[0u64, 0, 0], [1, 2, 0], [3, 0, 2]] {
            let (a, _) = mixture_probability(&p, &eta, 32, SimplexMethod::TensorBeta).unwrap();
            let (b, _) = mixture_probability(&p, &eta, 32, SimplexMethod::NestedJacobi).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-10);
        }
    }

    #[test]
    fn marginal_is_normalized_with_affine_mean() {
        let p = params(1.0, 4, 0.2, 0.8);
        for site in 1..=4usize {
            let m = marginal_distribution(&p, site, 80, 1e-12).unwrap();
            let total: f64 = m.iter().sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-9);
            let mean: f64 = m.iter().enumerate().map(|(k, &v)| k as f64 * v).sum();
            let theta_mean = 0.2 + 0.6 * site as f64 / 5.0;
            assert_relative_eq!(mean, 2.0 * theta_mean, max_relative = 1e-9);
        }
    }

    #[test]
    fn marginal_matches_full_mixture_marginalized() {
        // N=2: sum over the other site of the joint mixture equals the 1-D marginal
        let p = params(0.5, 2, 0.2, 0.8);
        let marg = marginal_distribution(&p, 1, 10, 1e-12).unwrap();
        for m in 0..=4u64 {
            let mut total = 0.0;
            for other in 0..=80u64 {
                let (v, _) =
                    mixture_probability(&p, &[m, other], 40, SimplexMethod::TensorBeta).unwrap();
                total += v;
            }
            assert_relative_eq!(marg[m as usize], total, max_relative = 1e-8);
        }
    }

    #[test]
    fn sampler_potentials_are_ordered_with_dirichlet_means() {
        let p = params(0.65, 4, 0.2, 0.8);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let draws = 100_000;
        let mut means = [0.0f64; 4];
        for _ in 0..draws {
            let d = sample_mixture(&p, &mut rng);
            assert!(d.thetas.windows(2).all(|w| w[0] <= w[1]));
            assert!(d.thetas[0] >= 0.2 - 1e-12 && d.thetas[3] <= 0.8 + 1e-12);
            for (m, &t) in means.iter_mut().zip(d.thetas.iter()) {
                *m += t;
            }
        }
        for (i, m) in means.iter().enumerate() {
            let want = 0.2 + 0.6 * (i + 1) as f64 / 5.0;
            assert!(
                (m / draws as f64 - want).abs() < 3e-3,
                "site {i}: {} vs {want}",
                m / draws as f64
            );
        }
    }

    #[test]
    fn mc_agrees_with_quadrature_within_stderr() {
        let p = params(0.5, 3, 0.2, 0.8);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let eta = [1u64, 0, 2];
        let (exact, _) = mixture_probability(&p, &eta, 32, SimplexMethod::TensorBeta).unwrap();
        let (mc, se) = mixture_probability_mc(&p, &eta, 400_000, &mut rng);
        assert!(
            (mc - exact).abs() < 4.0 * se,
            "mc {mc} exact {exact} se {se}"
        );
    }
}
