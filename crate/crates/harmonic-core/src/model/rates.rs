//! Jump rates of the harmonic process.
//!
//! A pile of `n` particles sheds `k` of them at rate
//! `phi_s(k, n) = (1/k) * Gamma(n+1) Gamma(n-k+2s) / (Gamma(n-k+1) Gamma(n+2s))`
//! for `1 <= k <= n`, and the total exit rate telescopes to the shifted
//! harmonic number `sum_{k<=n} 1/(k+2s-1)`. Reservoirs inject `k` particles
//! at rate `(1/k) (rho/(1+rho))^k`, a logarithmic-series channel with total
//! rate `log(1+rho)`.

use crate::numerics::special::ln_gamma;

/// Rate at which `k` of `n` stacked particles jump together.
///
/// Returns 0 outside `1 <= k <= n`. Evaluated through log-gamma differences
/// grouped so the `s = 1/2` case cancels exactly to `1/k`.
pub fn jump_rate(s: f64, k: u64, n: u64) -> f64 {
    if k == 0 || k > n {
        return 0.0;
    }
    let (kf, nf) = (k as f64, n as f64);
    let two_s = 2.0 * s;
    let log_ratio = (ln_gamma(nf + 1.0) - ln_gamma(nf + two_s))
        + (ln_gamma(nf - kf + two_s) - ln_gamma(nf - kf + 1.0));
    log_ratio.exp() / kf
}

/// Total exit rate of a pile of `n` particles: the shifted harmonic number
/// `sum_{k=1..n} 1/(k + 2s - 1)`.
pub fn total_exit_rate(s: f64, n: u64) -> f64 {
    let mut acc = 0.0;
    for k in (1..=n).rev() {
        acc += 1.0 / (k as f64 + 2.0 * s - 1.0);
    }
    acc
}

/// Total reservoir injection rate `sum_k (1/k) (rho/(1+rho))^k = log(1+rho)`.
#[inline]
pub fn injection_total_rate(rho: f64) -> f64 {
    rho.ln_1p()
}

/// Unnormalized injection weight of a batch of size `k >= 1`.
#[inline]
pub fn injection_weight(rho: f64, k: u64) -> f64 {
    let x = rho / (1.0 + rho);
    x.powi(k as i32) / k as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn half_spin_rate_is_one_over_k() {
        // at s = 1/2 the gamma ratio cancels exactly
        for n in 1..=200u64 {
            for k in 1..=n {
                assert_eq!(jump_rate(0.5, k, n), 1.0 / k as f64, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn single_particle_rate() {
        assert_relative_eq!(jump_rate(0.5, 1, 1), 1.0, epsilon = 1e-14);
        assert_relative_eq!(jump_rate(1.0, 1, 1), 0.5, max_relative = 1e-13);
    }

    #[test]
    fn out_of_range_k_is_zero() {
        assert_eq!(jump_rate(0.7, 3, 2), 0.0);
        assert_eq!(jump_rate(0.7, 0, 5), 0.0);
    }

    #[test]
    fn exit_rate_matches_harmonic_numbers() {
        // H_3 for s = 1/2
        assert_relative_eq!(total_exit_rate(0.5, 3), 11.0 / 6.0, max_relative = 1e-15);
        // 1/2 + 1/3 for s = 1
        assert_relative_eq!(total_exit_rate(1.0, 2), 5.0 / 6.0, max_relative = 1e-15);
        assert_eq!(total_exit_rate(1.3, 0), 0.0);
    }

    #[test]
    fn rate_identity_sums() {
        // sum_k jump_rate(s,k,n) equals the shifted harmonic number
        for &s in &[0.5, 1.0, 1.5, 0.73] {
            for n in [1u64, 2, 5, 17, 60, 200] {
                let direct: f64 = (1..=n).map(|k| jump_rate(s, k, n)).sum();
                assert_relative_eq!(
                    direct,
                    total_exit_rate(s, n),
                    max_relative = 1e-12,
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn s1_rate_example() {
        let total: f64 = (1..=3).map(|k| jump_rate(1.0, k, 3)).sum();
        assert_relative_eq!(total, 13.0 / 12.0, max_relative = 1e-13);
    }

    #[test]
    fn injection_series_sums_to_log() {
        // partial sums of (1/k) x^k converge to -log(1-x) = log(1+rho)
        for &rho in &[0.3, 1.0, 2.5] {
            let mut partial = 0.0;
            for k in 1..=200 {
                partial += injection_weight(rho, k);
            }
            assert_relative_eq!(partial, injection_total_rate(rho), max_relative = 1e-12);
        }
        assert_eq!(injection_total_rate(0.0), 0.0);
        assert_eq!(injection_weight(0.0, 1), 0.0);
    }
}
