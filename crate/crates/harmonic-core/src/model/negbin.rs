//! Negative Binomial marginals with shape `2s` and scale `theta` (mean
//! `2s * theta`), their moment generating function, and sampling via the
//! Gamma–Poisson mixture.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use crate::numerics::special::ln_gamma;
use crate::{Error, Result};

/// Probability of `n` particles under NegBin(2s, theta).
pub fn negbin_pmf(s: f64, theta: f64, n: u64) -> f64 {
    if theta == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let two_s = 2.0 * s;
    let nf = n as f64;
    let ln_p = ln_gamma(two_s + nf) - ln_gamma(two_s) - ln_gamma(nf + 1.0)
        + nf * (theta.ln() - theta.ln_1p())
        - two_s * theta.ln_1p();
    ln_p.exp()
}

/// Moment generating function `(1 + theta (1 - e^h))^(-2s)`.
///
/// `1 - e^h` is formed as `-expm1(h)`; the domain requires
/// `1 + theta (1 - e^h) > 0`.
pub fn negbin_mgf(s: f64, theta: f64, h: f64) -> Result<f64> {
    let u = -h.exp_m1();
    let arg = theta * u;
    if arg <= -1.0 {
        return Err(Error::domain(format!(
            "negbin mgf undefined: 1 + theta(1-e^h) = {} <= 0 (theta={theta}, h={h})",
            1.0 + arg
        )));
    }
    Ok((-2.0 * s * arg.ln_1p()).exp())
}

/// Draw from NegBin(2s, theta) as Poisson(Gamma(2s, theta)).
pub fn negbin_sample<R: Rng + ?Sized>(s: f64, theta: f64, rng: &mut R) -> u64 {
    if theta <= 0.0 {
        return 0;
    }
    let gamma = Gamma::new(2.0 * s, theta).expect("valid gamma parameters");
    let lambda: f64 = gamma.sample(rng);
    if lambda <= 0.0 {
        return 0;
    }
    let poisson = Poisson::new(lambda).expect("positive poisson mean");
    poisson.sample(rng) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pmf_at_zero_is_inverse_power() {
        for &(s, theta) in &[(0.5, 1.0), (1.0, 0.3), (0.65, 2.0)] {
            let want = (1.0f64 / (1.0 + theta)).powf(2.0 * s);
            assert_relative_eq!(negbin_pmf(s, theta, 0), want, max_relative = 1e-14);
        }
    }

    #[test]
    fn half_spin_is_geometric() {
        // s = 1/2, theta = 1: P(n) = (1/2)^(n+1)
        for n in 0..30u64 {
            assert_relative_eq!(
                negbin_pmf(0.5, 1.0, n),
                0.5f64.powi(n as i32 + 1),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn normalizes_and_has_mean_two_s_theta() {
        for &(s, theta) in &[(0.5, 0.7), (1.3, 1.9), (2.0, 0.2)] {
            let cap = (50.0 * (1.0 + theta)) as u64;
            let mut total = 0.0;
            let mut mean = 0.0;
            for n in 0..=cap {
                let p = negbin_pmf(s, theta, n);
                total += p;
                mean += n as f64 * p;
            }
            assert_relative_eq!(total, 1.0, epsilon = 1e-10);
            assert_relative_eq!(mean, 2.0 * s * theta, max_relative = 1e-9);
        }
    }

    #[test]
    fn degenerate_theta_zero() {
        assert_eq!(negbin_pmf(1.0, 0.0, 0), 1.0);
        assert_eq!(negbin_pmf(1.0, 0.0, 3), 0.0);
        assert_eq!(negbin_mgf(1.0, 0.0, 5.0).unwrap(), 1.0);
    }

    #[test]
    fn mgf_normalization_and_series() {
        assert_relative_eq!(negbin_mgf(0.7, 1.3, 0.0).unwrap(), 1.0, epsilon = 1e-15);
        // s=1/2, theta=1, e^h = 3/2: direct series sum of e^(hn) (1/2)^(n+1) = 2
        let h = (1.5f64).ln();
        let mut series = 0.0;
        for n in 0..2000 {
            series += (h * n as f64 - (n + 1) as f64 * std::f64::consts::LN_2).exp();
        }
        let mgf = negbin_mgf(0.5, 1.0, h).unwrap();
        assert_relative_eq!(mgf, 2.0, max_relative = 1e-12);
        assert_relative_eq!(mgf, series, max_relative = 1e-9);
    }

    #[test]
    fn mgf_domain_error() {
        // theta=1: domain needs e^h < 2
        assert!(negbin_mgf(0.5, 1.0, 0.8).is_err());
        assert!(negbin_mgf(0.5, 1.0, 0.5).is_ok());
    }

    #[test]
    fn sampler_matches_pmf_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (s, theta) = (1.0, 0.8);
        let n = 200_000;
        let mean: f64 = (0..n).map(|_| negbin_sample(s, theta, &mut rng) as f64).sum::<f64>() / n as f64;
        let want = 2.0 * s * theta;
        assert!((mean - want).abs() < 0.02, "sample mean {mean} vs {want}");
    }
}
