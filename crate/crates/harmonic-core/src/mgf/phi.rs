//! The reduced generating function `Phi_N(c)`: density-independent core of
//! the steady-state MGF, as an N-fold sum and as ordered-simplex integrals.

use crate::ness::simplex::{simplex_product_expectation, SimplexMethod};
use crate::numerics::special::{ln_gamma, ln_gamma_ratio};
use crate::numerics::summation::NeumaierSum;
use crate::{Error, Result};

/// Which integral representation evaluates `Phi_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegralVariant {
    /// nested integrals over the ordered simplex in the `u` variables
    Nested,
    /// iterated integrals over the unit cube in the `t` variables
    Iterated,
}

/// `Phi_N(c)` as the truncated N-fold sum, returned with the magnitude of
/// the outermost retained shell as a truncation estimate.
///
/// The sum runs over the tail-sum variables `m_1 >= ... >= m_N >= 0`
/// truncated at `m_1 <= cap`, evaluated by a one-dimensional recursion per
/// site, so the cost is `O(N cap^2)`.
pub fn phi_unnested_sum(c: &[f64], s: f64, cap: u64) -> Result<(f64, f64)> {
    let n_sites = c.len();
    if n_sites == 0 {
        return Ok((1.0, 0.0));
    }
    let worst = c.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    if worst >= 1.0 {
        return Err(Error::domain(format!(
            "unnested sum diverges for max|c_i| = {worst} >= 1"
        )));
    }
    let two_s = 2.0 * s;
    let len = cap as usize + 1;
    // negbin-type coefficients q(d) = Gamma(d+2s) / (Gamma(2s) d!)
    let q: Vec<f64> = (0..len)
        .map(|d| {
            (ln_gamma(d as f64 + two_s) - ln_gamma(two_s) - ln_gamma(d as f64 + 1.0)).exp()
        })
        .collect();

    // T_i(m) = W_i(m) sum_{m' <= m} c_i^(m-m') q(m-m') T_{i+1}(m')
    let mut t = vec![0.0f64; len];
    t[0] = 1.0;
    for site in (1..=n_sites).rev() {
        let ci = c[site - 1];
        let mut powers = vec![0.0f64; len];
        let mut p = 1.0;
        for (d, slot) in powers.iter_mut().enumerate() {
            *slot = p * q[d];
            p *= ci;
        }
        let mut next = vec![0.0f64; len];
        for (m, slot) in next.iter_mut().enumerate() {
            let mut acc = NeumaierSum::new();
            for mp in 0..=m {
                let v = powers[m - mp] * t[mp];
                if v != 0.0 {
                    acc.add(v);
                }
            }
            let w = ln_gamma_ratio(
                two_s * (n_sites - site + 1) as f64 + m as f64,
                two_s * (n_sites - site + 2) as f64 + m as f64,
            )
            .exp();
            *slot = w * acc.value();
        }
        t = next;
    }
    let prefactor = ln_gamma_ratio(two_s * (n_sites as f64 + 1.0), two_s).exp();
    let mut total = NeumaierSum::new();
    for &v in &t {
        total.add(v);
    }
    let shell = prefactor * t[len - 1].abs();
    Ok((prefactor * total.value(), shell))
}

/// `Phi_N(c)` by quadrature over the ordered simplex (or the equivalent
/// iterated cube), spectrally accurate including fractional `2s`.
pub fn phi_nested_integral(
    c: &[f64],
    s: f64,
    nodes: usize,
    variant: IntegralVariant,
) -> Result<f64> {
    let n_sites = c.len();
    if n_sites == 0 {
        return Ok(1.0);
    }
    if c.iter().any(|&x| x >= 1.0) {
        return Err(Error::domain("integral representation requires c_i < 1"));
    }
    let method = match variant {
        IntegralVariant::Nested => SimplexMethod::NestedJacobi,
        IntegralVariant::Iterated => SimplexMethod::TensorBeta,
    };
    simplex_product_expectation(s, n_sites, nodes, method, |i, u| {
        (-2.0 * s * (-c[i] * (1.0 - u)).ln_1p()).exp()
    })
}
