//! Reconstruction of the steady-state probabilities from the scaled
//! factorial moments by the truncated alternating sum over `xi >= eta`.
//!
//! Both the moment table and the reconstruction are separable per site, so
//! they are computed as per-axis triangular transforms of an N-dimensional
//! tensor over the box `{0..cap}^N`:
//!
//! * `G = M (x) ... (x) M  applied to  F`, with
//!   `M[x, y] = C(x, y) rho_r^(x-y) (rho_l - rho_r)^y`;
//! * `mu = A (x) ... (x) A  applied to  G`, with
//!   `A[e, x] = (-1)^(x-e) C(x, e) Gamma(2s+x) / (Gamma(2s) x!)`.
//!
//! The alternating reconstruction loses accuracy as `rho_right` approaches
//! one (terms grow like `(rho_r + rho_r - rho_l)^|xi|` against a result
//! of order `rho_r^|xi|`), which is why the mixture integral remains the
//! primary route; this one is kept for validation. The per-state shell
//! estimate is the change under shrinking the cap by a few shells.

use crate::model::ModelParams;
use crate::ness::{f_weight_product, reconstruction_coefficient};
use crate::numerics::special::binomial;
use crate::numerics::summation::NeumaierSum;
use crate::{Error, Result};

const MAX_TABLE: u128 = 20_000_000;
const SHELL_BACKOFF: u64 = 4;

/// Probability table reconstructed from the factorial moments on a
/// truncated box, with per-state truncation estimates.
#[derive(Debug, Clone)]
pub struct NessReconstruction {
    params: ModelParams,
    cap: u64,
    mu: Vec<f64>,
    moments: Vec<f64>,
    shell: Vec<f64>,
    shell_cap: u64,
}

impl NessReconstruction {
    /// Build the table with moment indices up to `xi_cap` per site.
    pub fn new(params: &ModelParams, xi_cap: u64) -> Result<Self> {
        Self::build(params, xi_cap, f_weight_product)
    }

    /// Same table through the closed-form gamma-telescope weights; an
    /// independent route for the equivalence battery.
    pub fn new_with_closed_weights(params: &ModelParams, xi_cap: u64) -> Result<Self> {
        Self::build(params, xi_cap, crate::ness::f_weight_product_closed)
    }

    fn build(
        params: &ModelParams,
        xi_cap: u64,
        weight: fn(&ModelParams, &[u64]) -> f64,
    ) -> Result<Self> {
        if xi_cap < SHELL_BACKOFF + 1 {
            return Err(Error::domain(format!(
                "xi_cap must exceed {SHELL_BACKOFF}"
            )));
        }
        let states = (xi_cap as u128 + 1).checked_pow(params.n_sites() as u32);
        match states {
            Some(s) if s <= MAX_TABLE => {}
            _ => {
                return Err(Error::StateSpaceTooLarge {
                    states: states.unwrap_or(u128::MAX),
                    limit: MAX_TABLE,
                })
            }
        }
        let (moments, mu) = build_tables(params, xi_cap, weight);
        let (_, mu_small) = build_tables(params, xi_cap - SHELL_BACKOFF, weight);
        let small_len = (xi_cap - SHELL_BACKOFF + 1) as usize;
        let mut shell = vec![0.0; mu_small.len()];
        let mut idx_small = vec![0u64; params.n_sites()];
        for (flat, slot) in shell.iter_mut().enumerate() {
            decode(flat, small_len, &mut idx_small);
            let big = encode(&idx_small, (xi_cap + 1) as usize);
            *slot = (mu[big] - mu_small[flat]).abs();
            let _ = flat;
        }
        Ok(NessReconstruction {
            params: *params,
            cap: xi_cap,
            mu,
            moments,
            shell,
            shell_cap: xi_cap - SHELL_BACKOFF,
        })
    }

    #[inline]
    pub fn cap(&self) -> u64 {
        self.cap
    }

    #[inline]
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Reconstructed `mu(eta)`.
    pub fn probability(&self, eta: &[u64]) -> Result<f64> {
        self.lookup(&self.mu, eta, self.cap)
    }

    /// Tabulated `G(xi)` (matches [`crate::ness::factorial_moment`]).
    pub fn moment(&self, xi: &[u64]) -> Result<f64> {
        self.lookup(&self.moments, xi, self.cap)
    }

    /// Empirical truncation estimate at `eta`: the change of the
    /// reconstructed value when the moment cap shrinks by a few shells.
    pub fn shell_estimate(&self, eta: &[u64]) -> Result<f64> {
        self.lookup(&self.shell, eta, self.shell_cap)
    }

    /// Largest shell estimate over states below `eta_max` per site.
    pub fn max_shell_estimate(&self, eta_max: u64) -> f64 {
        let bound = eta_max.min(self.shell_cap);
        let len = (self.shell_cap + 1) as usize;
        let mut worst = 0.0f64;
        let mut idx = vec![0u64; self.params.n_sites()];
        for (flat, &v) in self.shell.iter().enumerate() {
            decode(flat, len, &mut idx);
            if idx.iter().all(|&c| c <= bound) {
                worst = worst.max(v);
            }
        }
        worst
    }

    fn lookup(&self, table: &[f64], eta: &[u64], cap: u64) -> Result<f64> {
        if eta.len() != self.params.n_sites() {
            return Err(Error::domain("configuration length mismatch"));
        }
        if eta.iter().any(|&e| e > cap) {
            return Err(Error::domain(format!(
                "occupation exceeds table cap {cap}"
            )));
        }
        Ok(table[encode(eta, (cap + 1) as usize)])
    }
}

/// One-shot reconstruction of `mu(eta)`; returns `(value, shell_estimate)`.
pub fn ness_probability(params: &ModelParams, eta: &[u64], xi_cap: u64) -> Result<(f64, f64)> {
    let table = NessReconstruction::new(params, xi_cap)?;
    Ok((table.probability(eta)?, table.shell_estimate(eta)?))
}

fn encode(idx: &[u64], len: usize) -> usize {
    let mut flat = 0usize;
    for &c in idx.iter().rev() {
        flat = flat * len + c as usize;
    }
    flat
}

fn decode(mut flat: usize, len: usize, out: &mut [u64]) {
    for slot in out.iter_mut() {
        *slot = (flat % len) as u64;
        flat /= len;
    }
}

fn build_tables(
    params: &ModelParams,
    cap: u64,
    weight: fn(&ModelParams, &[u64]) -> f64,
) -> (Vec<f64>, Vec<f64>) {
    let n_sites = params.n_sites();
    let len = (cap + 1) as usize;
    let total = len.pow(n_sites as u32);

    let mut table = vec![0.0f64; total];
    let mut idx = vec![0u64; n_sites];
    for (flat, slot) in table.iter_mut().enumerate() {
        decode(flat, len, &mut idx);
        *slot = weight(params, &idx);
    }

    // moment transform, lower triangular in each axis
    let (rho_l, rho_r) = (params.rho_left(), params.rho_right());
    let diff = rho_l - rho_r;
    let mut m = vec![0.0f64; len * len];
    for x in 0..len {
        for y in 0..=x {
            m[x * len + y] =
                binomial(x as u64, y as u64) * rho_r.powi((x - y) as i32) * diff.powi(y as i32);
        }
    }
    for axis in 0..n_sites {
        apply_axis(&mut table, len, axis, &m);
    }
    let moments = table.clone();

    // reconstruction transform, upper triangular in each axis
    let two_s = params.two_s();
    let mut a = vec![0.0f64; len * len];
    for e in 0..len {
        for x in e..len {
            a[e * len + x] = reconstruction_coefficient(two_s, e as u64, x as u64);
        }
    }
    for axis in 0..n_sites {
        apply_axis(&mut table, len, axis, &a);
    }
    (moments, table)
}

/// Replace the tensor along `axis` by `out[x] = sum_y T[x, y] in[y]`,
/// compensated per output entry.
fn apply_axis(data: &mut [f64], len: usize, axis: usize, t: &[f64]) {
    let stride = len.pow(axis as u32);
    let total = data.len();
    let mut col = vec![0.0f64; len];
    let block = stride * len;
    let mut base = 0;
    while base < total {
        for lane in 0..stride {
            let start = base + lane;
            for (k, c) in col.iter_mut().enumerate() {
                *c = data[start + k * stride];
            }
            for x in 0..len {
                let row = &t[x * len..(x + 1) * len];
                let mut acc = NeumaierSum::new();
                for (y, &c) in col.iter().enumerate() {
                    let w = row[y];
                    if w != 0.0 && c != 0.0 {
                        acc.add(w * c);
                    }
                }
                data[start + x * stride] = acc.value();
            }
        }
        base += block;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::negbin::negbin_pmf;
    use crate::ness::factorial_moment;
    use approx::assert_relative_eq;

    fn params(s: f64, n: usize, rl: f64, rr: f64) -> ModelParams {
        ModelParams::new(s, n, rl, rr).unwrap()
    }

    #[test]
    fn equilibrium_reconstruction_recovers_negbin() {
        // N=1, rho_l = rho_r = 0.5: mu(n) -> nu(n)
        for &s in &[0.5, 1.0] {
            let p = params(s, 1, 0.5, 0.5);
            let table = NessReconstruction::new(&p, 80).unwrap();
            for n in 0..=8u64 {
                let got = table.probability(&[n]).unwrap();
                assert_relative_eq!(got, negbin_pmf(s, 0.5, n), epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn tabulated_moments_match_direct_sum() {
        let p = params(1.0, 2, 0.2, 0.5);
        let table = NessReconstruction::new(&p, 20).unwrap();
        for xi in [[0u64, 0], [1, 0], [2, 3], [5, 1]] {
            assert_relative_eq!(
                table.moment(&xi).unwrap(),
                factorial_moment(&p, &xi),
                max_relative = 1e-11
            );
        }
    }

    #[test]
    fn probabilities_normalize_on_small_states() {
        let p = params(0.5, 2, 0.2, 0.5);
        let table = NessReconstruction::new(&p, 50).unwrap();
        let mut total = 0.0;
        for a in 0..=45u64 {
            for b in 0..=45u64 {
                total += table.probability(&[a, b]).unwrap();
            }
        }
        assert_relative_eq!(total, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn shell_estimate_is_small_at_moderate_density() {
        let p = params(1.0, 2, 0.2, 0.5);
        let table = NessReconstruction::new(&p, 60).unwrap();
        assert!(table.max_shell_estimate(6) < 1e-10);
    }

    #[test]
    fn rejects_untabulated_states() {
        let p = params(1.0, 2, 0.2, 0.5);
        let table = NessReconstruction::new(&p, 10).unwrap();
        assert!(table.probability(&[11, 0]).is_err());
        assert!(table.probability(&[1]).is_err());
    }
}
