//! Truncated Markov generator of the open harmonic process.
//!
//! The state space is cut to occupations `0..=cap` per site. Transitions
//! that would leave the box are dropped from the off-diagonal but kept in
//! the diagonal, so the truncation turns `L` into a proper sub-generator:
//! row sums are `<= 0`, with equality exactly where nothing was dropped.
//! The dropped rate mass per state is tracked and, paired with a reference
//! product measure, yields the truncation-leak bound used by the
//! stationarity checks.

use crate::model::negbin::negbin_pmf;
use crate::model::rates::{injection_total_rate, injection_weight, jump_rate, total_exit_rate};
use crate::model::ModelParams;
use crate::numerics::linear::DenseMatrix;
use crate::{Error, Result};

const MAX_STATES: u128 = 10_000_000;
const MAX_DENSE_SOLVE: usize = 1500;

/// Sparse truncated generator with per-state dropped-rate bookkeeping.
#[derive(Debug, Clone)]
pub struct TruncatedGenerator {
    params: ModelParams,
    cap: u64,
    n_states: usize,
    /// off-diagonal transitions per source state
    transitions: Vec<Vec<(u32, f64)>>,
    /// full (untruncated) negative exit rates
    diag: Vec<f64>,
    /// rate mass dropped by the truncation, per state
    dropped: Vec<f64>,
}

impl TruncatedGenerator {
    #[inline]
    pub fn cap(&self) -> u64 {
        self.cap
    }

    #[inline]
    pub fn n_states(&self) -> usize {
        self.n_states
    }

    #[inline]
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    #[inline]
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    #[inline]
    pub fn dropped(&self) -> &[f64] {
        &self.dropped
    }

    /// Mixed-radix index of a configuration in the truncated box.
    pub fn state_index(&self, occupations: &[u64]) -> usize {
        debug_assert_eq!(occupations.len(), self.params.n_sites());
        let base = self.cap + 1;
        let mut idx = 0u64;
        for &o in occupations.iter().rev() {
            debug_assert!(o <= self.cap);
            idx = idx * base + o;
        }
        idx as usize
    }

    /// Inverse of [`Self::state_index`].
    pub fn index_state(&self, mut idx: usize) -> Vec<u64> {
        let base = (self.cap + 1) as usize;
        let mut occ = Vec::with_capacity(self.params.n_sites());
        for _ in 0..self.params.n_sites() {
            occ.push((idx % base) as u64);
            idx /= base;
        }
        occ
    }

    /// Row sum `diag + sum(off-diagonal)`; `-dropped` up to rounding.
    pub fn row_sum(&self, state: usize) -> f64 {
        self.diag[state] + self.transitions[state].iter().map(|&(_, r)| r).sum::<f64>()
    }

    /// Left action `mu^T L`, the stationarity residual of a measure given
    /// as a dense vector over the truncated box.
    pub fn apply_left(&self, mu: &[f64]) -> Vec<f64> {
        assert_eq!(mu.len(), self.n_states);
        let mut out: Vec<f64> = mu
            .iter()
            .zip(self.diag.iter())
            .map(|(&m, &d)| m * d)
            .collect();
        for (src, row) in self.transitions.iter().enumerate() {
            let m = mu[src];
            if m == 0.0 {
                continue;
            }
            for &(dst, rate) in row {
                out[dst as usize] += m * rate;
            }
        }
        out
    }

    /// Total dropped rate mass weighted by a reference measure over the box.
    pub fn truncation_leak(&self, reference: &[f64]) -> f64 {
        assert_eq!(reference.len(), self.n_states);
        self.dropped
            .iter()
            .zip(reference.iter())
            .map(|(&d, &w)| d * w)
            .sum()
    }

    /// Null-left-vector of the truncated generator, normalized to total mass
    /// one: the stationary distribution up to truncation leakage.
    pub fn stationary_vector(&self) -> Result<Vec<f64>> {
        let n = self.n_states;
        if n > MAX_DENSE_SOLVE {
            return Err(Error::StateSpaceTooLarge {
                states: n as u128,
                limit: MAX_DENSE_SOLVE as u128,
            });
        }
        // mu^T L = 0 with one equation replaced by sum(mu) = 1
        let mut m = DenseMatrix::zeros(n);
        for (src, row) in self.transitions.iter().enumerate() {
            *m.at_mut(src, src) += self.diag[src];
            for &(dst, rate) in row {
                *m.at_mut(dst as usize, src) += rate;
            }
        }
        let norm_row = n - 1;
        for j in 0..n {
            *m.at_mut(norm_row, j) = 1.0;
        }
        let mut rhs = vec![0.0; n];
        rhs[norm_row] = 1.0;
        m.solve(rhs)
    }
}

/// Assemble the truncated generator. `(cap+1)^N` must stay within the
/// state-space guard.
pub fn build_truncated_generator(params: &ModelParams, cap: u64) -> Result<TruncatedGenerator> {
    if cap == 0 {
        return Err(Error::domain("cap must be >= 1"));
    }
    let n_sites = params.n_sites();
    let states = (cap as u128 + 1).checked_pow(n_sites as u32).unwrap_or(u128::MAX);
    if states > MAX_STATES {
        return Err(Error::StateSpaceTooLarge {
            states,
            limit: MAX_STATES,
        });
    }
    let n_states = states as usize;
    let s = params.s();
    let (rho_l, rho_r) = (params.rho_left(), params.rho_right());
    let lambda_l = injection_total_rate(rho_l);
    let lambda_r = injection_total_rate(rho_r);

    let mut gen = TruncatedGenerator {
        params: *params,
        cap,
        n_states,
        transitions: vec![Vec::new(); n_states],
        diag: vec![0.0; n_states],
        dropped: vec![0.0; n_states],
    };

    let mut occ = vec![0u64; n_sites];
    for idx in 0..n_states {
        {
            let mut rem = idx;
            for slot in occ.iter_mut() {
                *slot = (rem % (cap as usize + 1)) as u64;
                rem /= cap as usize + 1;
            }
        }
        let mut retained = 0.0;
        let mut full = lambda_l + lambda_r;
        let row = &mut gen.transitions[idx];

        // bulk bonds (i, i+1)
        for i in 0..n_sites.saturating_sub(1) {
            for (from, to) in [(i, i + 1), (i + 1, i)] {
                let n_here = occ[from];
                full += total_exit_rate(s, n_here);
                for k in 1..=n_here {
                    let rate = jump_rate(s, k, n_here);
                    if occ[to] + k <= cap {
                        let mut target = occ.clone();
                        target[from] -= k;
                        target[to] += k;
                        row.push((mixed_radix(&target, cap) as u32, rate));
                        retained += rate;
                    }
                }
            }
        }

        // boundary channels; for N = 1 both reservoirs act on the same site
        for (site, rho) in [(0usize, rho_l), (n_sites - 1, rho_r)] {
            let n_here = occ[site];
            full += total_exit_rate(s, n_here);
            for k in 1..=n_here {
                let rate = jump_rate(s, k, n_here);
                let mut target = occ.clone();
                target[site] -= k;
                row.push((mixed_radix(&target, cap) as u32, rate));
                retained += rate;
            }
            if rho > 0.0 {
                for k in 1..=(cap - n_here) {
                    let rate = injection_weight(rho, k);
                    let mut target = occ.clone();
                    target[site] += k;
                    row.push((mixed_radix(&target, cap) as u32, rate));
                    retained += rate;
                }
            }
        }

        gen.diag[idx] = -full;
        gen.dropped[idx] = (full - retained).max(0.0);
    }
    Ok(gen)
}

fn mixed_radix(occ: &[u64], cap: u64) -> u64 {
    let mut idx = 0u64;
    for &o in occ.iter().rev() {
        idx = idx * (cap + 1) + o;
    }
    idx
}

/// A product measure restricted to the truncated box, with the mass left
/// outside the box reported rather than renormalized.
#[derive(Debug, Clone)]
pub struct TruncatedProduct {
    pub weights: Vec<f64>,
    pub tail_mass: f64,
}

/// Product of NegBin(2s, rho) marginals on `{0..cap}^N`.
pub fn product_negbin_measure(s: f64, rho: f64, n_sites: usize, cap: u64) -> TruncatedProduct {
    let marginal: Vec<f64> = (0..=cap).map(|n| negbin_pmf(s, rho, n)).collect();
    let site_mass: f64 = marginal.iter().sum();
    let mut weights = vec![1.0f64; (cap as usize + 1).pow(n_sites as u32)];
    let base = cap as usize + 1;
    for (idx, w) in weights.iter_mut().enumerate() {
        let mut rem = idx;
        for _ in 0..n_sites {
            *w *= marginal[rem % base];
            rem /= base;
        }
    }
    TruncatedProduct {
        weights,
        tail_mass: 1.0 - site_mass.powi(n_sites as i32),
    }
}

/// Reversible equilibrium measure (`rho_left == rho_right`) on the box.
pub fn equilibrium_product_measure(params: &ModelParams, cap: u64) -> Result<TruncatedProduct> {
    if !params.is_equilibrium() {
        return Err(Error::params(
            "equilibrium product measure requires rho_left == rho_right",
        ));
    }
    Ok(product_negbin_measure(
        params.s(),
        params.rho_left(),
        params.n_sites(),
        cap,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn geometric_tail_mass() {
        // N=1, s=1/2, rho=1: marginal (1/2)^(n+1), tail beyond cap=20 is 2^-21
        let p = ModelParams::new(0.5, 1, 1.0, 1.0).unwrap();
        let m = equilibrium_product_measure(&p, 20).unwrap();
        assert_relative_eq!(m.tail_mass, 0.5f64.powi(21), max_relative = 1e-9);
        assert_relative_eq!(m.weights[3], 0.5f64.powi(4), max_relative = 1e-13);
    }

    #[test]
    fn zero_density_is_point_mass() {
        let p = ModelParams::new(1.0, 2, 0.0, 0.0).unwrap();
        let m = equilibrium_product_measure(&p, 8).unwrap();
        assert_eq!(m.weights[0], 1.0);
        assert!(m.weights[1..].iter().all(|&w| w == 0.0));
        assert_eq!(m.tail_mass, 0.0);
    }

    #[test]
    fn rejects_nonequilibrium() {
        let p = ModelParams::new(1.0, 2, 0.1, 0.2).unwrap();
        assert!(equilibrium_product_measure(&p, 8).is_err());
    }

    #[test]
    fn row_sums_nonpositive_with_equality_without_truncation() {
        let p = ModelParams::new(0.5, 2, 0.3, 0.9).unwrap();
        let gen = build_truncated_generator(&p, 6).unwrap();
        for state in 0..gen.n_states() {
            let rs = gen.row_sum(state);
            assert!(rs < 1e-12, "row sum {rs} at state {state}");
            assert_relative_eq!(rs, -gen.dropped()[state], epsilon = 1e-12);
        }
        // injections always drop their tail, so every state leaks a little
        assert!(gen.dropped().iter().all(|&d| d > 0.0));
    }

    #[test]
    fn state_space_guard() {
        let p = ModelParams::new(0.5, 9, 0.3, 0.9).unwrap();
        assert!(matches!(
            build_truncated_generator(&p, 20),
            Err(Error::StateSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn index_roundtrip() {
        let p = ModelParams::new(0.5, 3, 0.1, 0.4).unwrap();
        let gen = build_truncated_generator(&p, 4).unwrap();
        for idx in 0..gen.n_states() {
            let occ = gen.index_state(idx);
            assert_eq!(gen.state_index(&occ), idx);
        }
    }

    #[test]
    fn single_site_stationary_vector_is_geometric() {
        // N=1, s=1/2, rho_l=rho_r=1: stationary law is geometric(1/2)
        let p = ModelParams::new(0.5, 1, 1.0, 1.0).unwrap();
        let gen = build_truncated_generator(&p, 30).unwrap();
        let pi = gen.stationary_vector().unwrap();
        for n in 0..=10u64 {
            let want = 0.5f64.powi(n as i32 + 1);
            assert_relative_eq!(pi[n as usize], want, epsilon = 1e-10);
        }
    }

    #[test]
    fn equilibrium_residual_below_leak() {
        // reversible measure: ||nu^T L||_inf <= max_state nu * dropped <= leak
        for &(s, n_sites) in &[(0.5, 2usize), (1.0, 2), (0.5, 3)] {
            let p = ModelParams::new(s, n_sites, 0.6, 0.6).unwrap();
            let gen = build_truncated_generator(&p, 10).unwrap();
            let nu = equilibrium_product_measure(&p, 10).unwrap();
            let residual = gen.apply_left(&nu.weights);
            let max_res = residual.iter().fold(0.0f64, |a, &r| a.max(r.abs()));
            let leak = gen.truncation_leak(&nu.weights);
            assert!(
                max_res <= leak * (1.0 + 1e-9) + 1e-15,
                "residual {max_res} vs leak {leak} (s={s}, N={n_sites})"
            );
        }
    }
}
