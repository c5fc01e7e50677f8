//! Constant-field machinery for `Phi_N^(1)(c) := Phi_N(c, ..., c)`.
//!
//! Three independent routes:
//!
//! * a Beta-kernel recurrence in the system size, iterated on a Chebyshev
//!   grid over `[0, c]`;
//! * for integer `2s`, the residue finite sum: a polynomial in
//!   `L = -log(1-c)` with exponential factors `(1-c)^j`. The displayed
//!   form cancels catastrophically at small `L` (condition grows like
//!   `L^-(2s(N+1)-1-N)`), so the default evaluation expands it into an
//!   exact-rational Taylor series in `L` whose sub-leading coefficients
//!   vanish identically; the direct form (with a condition monitor) takes
//!   over at large `L` where it is stable and the series is not;
//! * the Laplace transform identity for the convolution kernel
//!   `G_N(v) = e^((2s-1)v) (1-e^(-2v))^(2s(N+1)-1) 2^(-2sN) Phi_N^(1)(1-e^(-2v))`,
//!   with the closed form checked against panel quadrature of the
//!   transform, parameterized by `v` throughout so `c -> 1` never loses
//!   precision.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::numerics::chebyshev::{lobatto_nodes, ChebyshevInterpolant};
use crate::numerics::quadrature::{cached_jacobi01, composite_legendre};
use crate::numerics::special::{ln_beta, ln_gamma};
use crate::numerics::summation::NeumaierSum;
use crate::{Error, Result};

/// `Phi_N^(1)(c)` by iterating the Beta-kernel recurrence on a Chebyshev
/// grid over `[0, c]`; returns the value and an empirical error estimate
/// from a coarser companion run.
pub fn phi_constant_recurrence(
    s: f64,
    n_sites: usize,
    c: f64,
    deg: usize,
    nodes: usize,
) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&c) {
        return Err(Error::domain(format!(
            "recurrence route requires 0 <= c < 1, got {c}"
        )));
    }
    if c == 0.0 {
        return Ok((1.0, 0.0));
    }
    let fine = recurrence_pass(s, n_sites, c, deg, nodes)?;
    let coarse = recurrence_pass(s, n_sites, c, deg - deg / 4, nodes - nodes / 4)?;
    Ok((fine, (fine - coarse).abs()))
}

fn recurrence_pass(s: f64, n_sites: usize, c: f64, deg: usize, nodes: usize) -> Result<f64> {
    let two_s = 2.0 * s;
    let grid = lobatto_nodes(deg, 0.0, c);
    let mut values = vec![1.0f64; deg + 1];
    for level in 1..=n_sites {
        let rule = cached_jacobi01(nodes, two_s * level as f64, two_s)?;
        let bnorm = ln_beta(two_s * level as f64, two_s).exp();
        let prev = ChebyshevInterpolant::new(0.0, c, values);
        let mut next = vec![0.0f64; deg + 1];
        for (j, &x) in grid.iter().enumerate() {
            let mut acc = 0.0;
            for (&t, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
                let kernel = (-two_s * (-c_times(t, x)).ln_1p()).exp();
                acc += w * kernel * prev.eval(t * x);
            }
            next[j] = acc / bnorm;
        }
        values = next;
    }
    // grid[0] is the upper endpoint c
    Ok(values[0])
}

#[inline]
fn c_times(t: f64, x: f64) -> f64 {
    t * x
}

/// Both evaluations of the residue finite sum at one point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FiniteSumEval {
    /// best available value (series at small `L`, direct form at large `L`)
    pub value: f64,
    /// the displayed finite sum evaluated directly in f64
    pub raw_value: f64,
    /// condition estimate of the direct form (sum |terms| / |sum|)
    pub raw_condition: f64,
}

/// Residue finite sum for `Phi_N^(1)(c)`, integer `2s` only.
pub fn phi_finite_sum(s: f64, n_sites: usize, c: f64) -> Result<FiniteSumEval> {
    if !(0.0 < c && c < 1.0) {
        return Err(Error::domain(format!(
            "finite sum requires 0 < c < 1, got {c}"
        )));
    }
    let big_l = -(-c).ln_1p();
    phi_finite_sum_logform(s, n_sites, big_l)
}

/// Same, parameterized by `L = -log(1-c)` (so `c` arbitrarily close to 1
/// stays exact); used by the Laplace-transform check with `L = 2v`.
pub fn phi_finite_sum_logform(s: f64, n_sites: usize, big_l: f64) -> Result<FiniteSumEval> {
    let tables = residue_tables(s, n_sites)?;
    let c = -(-big_l).exp_m1();
    let n_pow = tables.n_pow;
    // ln of Gamma(2s(N+1)) (2/c)^n, shared by both forms
    let ln_pref = ln_gamma(2.0 * tables.s() * (n_sites as f64 + 1.0))
        + n_pow as f64 * (std::f64::consts::LN_2 - c.ln());

    let (raw_sum, raw_cond) = tables.raw_sum(big_l);
    let raw_value = sign_exp(raw_sum, ln_pref);

    let (series_sum, series_cond) = tables.series_sum(big_l);
    // series evaluates S(L)/L^n, so the prefactor absorbs (2L/c)^n
    let ln_series_pref = ln_gamma(2.0 * tables.s() * (n_sites as f64 + 1.0))
        + n_pow as f64 * (std::f64::consts::LN_2 + big_l.ln() - c.ln());
    let series_value = sign_exp(series_sum, ln_series_pref);

    let value = if raw_cond < series_cond { raw_value } else { series_value };
    Ok(FiniteSumEval {
        value,
        raw_value,
        raw_condition: raw_cond,
    })
}

fn sign_exp(mantissa: f64, ln_scale: f64) -> f64 {
    mantissa.signum() * (mantissa.abs().ln() + ln_scale).exp()
}

/// Exact-rational residue data for one `(2s, N)`.
struct ResidueTables {
    two_s: u64,
    n_sites: usize,
    /// `n = 2s(N+1) - 1`
    n_pow: u64,
    /// `phi_{j,k}` evaluated at the poles, f64 image of exact rationals
    phi_jk: Vec<Vec<f64>>,
    /// Taylor coefficients `s_m` of `S(L)` for `m = n, n+1, ...`
    series: Vec<f64>,
}

impl ResidueTables {
    fn s(&self) -> f64 {
        self.two_s as f64 / 2.0
    }

    /// The displayed double sum `S(L)` with a condition monitor.
    fn raw_sum(&self, big_l: f64) -> (f64, f64) {
        let n = self.n_sites;
        let mut acc = NeumaierSum::new();
        for (j, row) in self.phi_jk.iter().enumerate() {
            let decay = (-(j as f64) * big_l).exp(); // (1-c)^j
            for (k, &phi) in row.iter().enumerate() {
                let ln_weight = (n - k) as f64 * (big_l.ln() - std::f64::consts::LN_2)
                    - ln_gamma((n - k) as f64 + 1.0)
                    - ln_gamma(k as f64 + 1.0);
                acc.add(ln_weight.exp() * decay * phi);
            }
        }
        let v = acc.value();
        let cond = if v == 0.0 {
            f64::INFINITY
        } else {
            acc.abs_mass() / v.abs()
        };
        (v, cond)
    }

    /// `S(L)/L^n` from the Taylor coefficients, with a condition estimate.
    fn series_sum(&self, big_l: f64) -> (f64, f64) {
        let mut acc = NeumaierSum::new();
        let mut power = 1.0;
        for &s_m in &self.series {
            acc.add(s_m * power);
            power *= big_l;
        }
        let v = acc.value();
        let cond = if v == 0.0 {
            f64::INFINITY
        } else {
            acc.abs_mass() / v.abs()
        };
        (v, cond)
    }
}

type ResidueCache = Mutex<HashMap<(u64, usize), Arc<ResidueTables>>>;

fn residue_cache() -> &'static ResidueCache {
    static CACHE: OnceLock<ResidueCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn residue_tables(s: f64, n_sites: usize) -> Result<Arc<ResidueTables>> {
    let two_s_f = 2.0 * s;
    if (two_s_f - two_s_f.round()).abs() > 1e-9 || two_s_f.round() < 1.0 {
        return Err(Error::domain(format!(
            "finite sum requires integer 2s >= 1, got 2s = {two_s_f}"
        )));
    }
    let two_s = two_s_f.round() as u64;
    if two_s > 8 || n_sites > 64 {
        return Err(Error::domain(
            "finite sum supported for 2s <= 8 and N <= 64",
        ));
    }
    let key = (two_s, n_sites);
    if let Some(t) = residue_cache().lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let t = Arc::new(build_residue_tables(two_s, n_sites));
    residue_cache().lock().unwrap().insert(key, t.clone());
    Ok(t)
}

fn big_factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

fn for_each_composition(k: u64, parts: usize, f: &mut impl FnMut(&[u64])) {
    fn rec(remaining: u64, idx: usize, buf: &mut [u64], f: &mut impl FnMut(&[u64])) {
        if idx + 1 == buf.len() {
            buf[idx] = remaining;
            f(buf);
            return;
        }
        for v in 0..=remaining {
            buf[idx] = v;
            rec(remaining - v, idx + 1, buf, f);
        }
    }
    let mut buf = vec![0u64; parts];
    rec(k, 0, &mut buf, f);
}

/// `phi_{j,k}` at the pole `alpha_j`: the k-th derivative of the product of
/// the other pole factors, via the general Leibniz rule over compositions
/// of `k` among the `2s - 1` remaining indices.
fn phi_jk_rational(two_s: u64, n_sites: u64, j: u64, k: u64) -> BigRational {
    let others: Vec<u64> = (0..two_s).filter(|&i| i != j).collect();
    if others.is_empty() {
        return if k == 0 {
            BigRational::one()
        } else {
            BigRational::zero()
        };
    }
    let mut total = BigRational::zero();
    for_each_composition(k, others.len(), &mut |split| {
        let mut term = BigRational::from_integer(big_factorial(k));
        for (&ji, &i) in split.iter().zip(others.iter()) {
            term /= BigRational::from_integer(big_factorial(ji));
            // (-1)^ji (N+ji)!/N! (2(i-j))^-(N+ji+1)
            let mut num = BigInt::one();
            for m in (n_sites + 1)..=(n_sites + ji) {
                num *= m;
            }
            if ji % 2 == 1 {
                num = -num;
            }
            let base = 2 * (i as i64 - j as i64);
            let den = BigInt::from(base).pow((n_sites + ji + 1) as u32);
            term *= BigRational::new(num, den);
        }
        total += term;
    });
    total
}

fn build_residue_tables(two_s: u64, n_sites: usize) -> ResidueTables {
    let n = n_sites as u64;
    let n_pow = two_s * (n + 1) - 1;
    let mut phi_rat: Vec<Vec<BigRational>> = Vec::with_capacity(two_s as usize);
    for j in 0..two_s {
        let row: Vec<BigRational> = (0..=n)
            .map(|k| phi_jk_rational(two_s, n, j, k))
            .collect();
        phi_rat.push(row);
    }
    let phi_jk: Vec<Vec<f64>> = phi_rat
        .iter()
        .map(|row| row.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect())
        .collect();

    // Taylor coefficients of S(L) = sum_{j,k} L^(N-k)/(2^(N-k)(N-k)!k!) e^(-jL) phi_{j,k}
    let m_max = (n_pow as usize) + 220;
    let mut coeffs = vec![BigRational::zero(); m_max + 1];
    for (j, row) in phi_rat.iter().enumerate() {
        for (k, phi) in row.iter().enumerate() {
            if phi.is_zero() {
                continue;
            }
            let base = phi
                / BigRational::from_integer(
                    BigInt::from(2).pow((n - k as u64) as u32)
                        * big_factorial(n - k as u64)
                        * big_factorial(k as u64),
                );
            let start = (n - k as u64) as usize;
            if j == 0 {
                coeffs[start] += &base;
                continue;
            }
            let neg_j = BigInt::from(-(j as i64));
            let mut jp = BigInt::one();
            for (p, slot) in (0..=(m_max - start)).zip(start..=m_max) {
                coeffs[slot] +=
                    &base * BigRational::new(jp.clone(), big_factorial(p as u64));
                jp *= &neg_j;
            }
        }
    }
    // all coefficients below L^n cancel identically
    debug_assert!(coeffs[..n_pow as usize].iter().all(|c| c.is_zero()));
    let series: Vec<f64> = coeffs[n_pow as usize..]
        .iter()
        .map(|r| r.to_f64().unwrap_or(f64::NAN))
        .collect();
    ResidueTables {
        two_s,
        n_sites,
        n_pow,
        phi_jk,
        series,
    }
}

/// Closed form of the Laplace transform of the convolution kernel,
/// `Ghat_N(alpha)`; domain `alpha > 2s - 1`.
pub fn laplace_ghat(s: f64, n_sites: usize, alpha: f64) -> Result<f64> {
    let two_s = 2.0 * s;
    if alpha <= two_s - 1.0 {
        return Err(Error::domain(format!(
            "laplace transform defined for alpha > 2s-1 = {}, got {alpha}",
            two_s - 1.0
        )));
    }
    let np1 = n_sites as f64 + 1.0;
    let ln = (two_s - 1.0) * std::f64::consts::LN_2 + ln_gamma(two_s * np1)
        - two_s * np1 * std::f64::consts::LN_2
        + np1 * (ln_gamma((alpha + 1.0 - two_s) / 2.0) - ln_gamma((alpha + 1.0 + two_s) / 2.0));
    Ok(ln.exp())
}

/// One row of the Laplace verification.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TransformCheck {
    pub alpha: f64,
    pub numeric: f64,
    pub closed_form: f64,
    pub rel_gap: f64,
    /// analytic bound on the discarded tail of the numeric integral
    pub tail_bound: f64,
}

/// Verify `int_0^inf e^(-alpha v) G_N(v) dv = Ghat_N(alpha)` on a grid of
/// `alpha`, integrating in the `v` variable with `Phi` from the residue
/// finite sum (integer `2s`).
pub fn g_transform_check(s: f64, n_sites: usize, alphas: &[f64]) -> Result<Vec<TransformCheck>> {
    let two_s = 2.0 * s;
    let tables = residue_tables(s, n_sites)?;
    let n_pow = tables.n_pow;
    let ln_g_pref =
        (two_s - 1.0) * std::f64::consts::LN_2 + ln_gamma(two_s * (n_sites as f64 + 1.0));
    // G_N(v) = 2^(2s-1) Gamma(2s(N+1)) e^((2s-1)v) S(2v)
    let g_n = |v: f64| -> f64 {
        if v == 0.0 {
            return 0.0;
        }
        let big_l = 2.0 * v;
        let (raw, raw_cond) = tables.raw_sum(big_l);
        let mantissa = if raw_cond < 1e6 {
            raw
        } else {
            let (ser, _) = tables.series_sum(big_l);
            ser * (n_pow as f64 * big_l.ln()).exp()
        };
        mantissa * (ln_g_pref + (two_s - 1.0) * v).exp()
    };

    alphas
        .iter()
        .map(|&alpha| {
            let closed_form = laplace_ghat(s, n_sites, alpha)?;
            let gap = alpha - (two_s - 1.0);
            let v_max = ((50.0 + 3.0 * n_sites as f64) / gap).max(10.0);
            let rule = composite_legendre(0.0, v_max, (4.0 * v_max).ceil() as usize, 10)?;
            let numeric = rule.integrate(|v| (-alpha * v).exp() * g_n(v));
            // integrand beyond v_max decays at least like e^(-gap v)
            let tail_bound = (-alpha * v_max).exp() * g_n(v_max).abs() / gap;
            Ok(TransformCheck {
                alpha,
                numeric,
                closed_form,
                rel_gap: (numeric - closed_form).abs() / closed_form.abs(),
                tail_bound,
            })
        })
        .collect()
}
