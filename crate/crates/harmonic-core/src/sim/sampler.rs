//! Exact jump-size sampling.
//!
//! Removal sizes follow `P(k) = phi_s(k, n) / H_s(n)`; the normalized
//! cumulative tables are memoized per occupancy and extended on demand,
//! since the same piles are hit millions of times per run. Injection sizes
//! follow the logarithmic distribution `P(k) = x^k / (k L)` with
//! `x = rho/(1+rho)` and `L = -log(1-x) = log(1+rho)`, inverted against
//! the analytic normalization.

use crate::model::rates::{jump_rate, total_exit_rate};

/// Cached inverse-CDF tables for the removal-size law at fixed `s`.
#[derive(Debug, Clone)]
pub struct RemovalSampler {
    s: f64,
    /// `cdf[n]` = cumulative normalized weights for occupancy `n`
    cdf: Vec<Vec<f64>>,
    /// cached shifted harmonic numbers `H_s(n)`
    exit: Vec<f64>,
}

impl RemovalSampler {
    pub fn new(s: f64) -> Self {
        RemovalSampler {
            s,
            cdf: vec![Vec::new()],
            exit: vec![0.0],
        }
    }

    #[inline]
    pub fn s(&self) -> f64 {
        self.s
    }

    /// Total exit rate `H_s(n)`, from the cache.
    #[inline]
    pub fn exit_rate(&mut self, n: u64) -> f64 {
        self.ensure(n);
        self.exit[n as usize]
    }

    fn ensure(&mut self, n: u64) {
        while self.cdf.len() <= n as usize {
            let m = self.cdf.len() as u64;
            let total = total_exit_rate(self.s, m);
            let mut acc = 0.0;
            let table: Vec<f64> = (1..=m)
                .map(|k| {
                    acc += jump_rate(self.s, k, m) / total;
                    acc
                })
                .collect();
            self.cdf.push(table);
            self.exit.push(total);
        }
    }

    /// Removal size for a pile of `n >= 1` particles from a uniform `u`.
    pub fn sample(&mut self, n: u64, u: f64) -> u64 {
        assert!(n >= 1, "cannot remove from an empty pile");
        self.ensure(n);
        let table = &self.cdf[n as usize];
        // inverse-CDF walk; the last entry is 1 up to rounding
        for (idx, &c) in table.iter().enumerate() {
            if u < c {
                return idx as u64 + 1;
            }
        }
        n
    }

    /// Probability `P(k)` of the removal-size law (for tests and reports).
    pub fn pmf(&mut self, n: u64, k: u64) -> f64 {
        self.ensure(n);
        jump_rate(self.s, k, n) / self.exit[n as usize]
    }
}

/// Injection batch size from the logarithmic distribution with parameter
/// `x = rho/(1+rho)`; requires `rho > 0`.
pub fn sample_injection_size(rho: f64, u: f64) -> u64 {
    debug_assert!(rho > 0.0);
    let x = rho / (1.0 + rho);
    let norm = rho.ln_1p();
    let mut k = 1u64;
    let mut term = x; // x^k / k at k=1, times 1/norm when compared
    let mut acc = term / norm;
    while u >= acc && k < 100_000 {
        k += 1;
        term *= x * (k - 1) as f64 / k as f64;
        acc += term / norm;
    }
    k
}
