//! Gauss–Jacobi and Gauss–Legendre rules via Golub–Welsch.
//!
//! Rules live on `[0, 1]` and absorb the weight `x^(a-1) (1-x)^(b-1)` into
//! the quadrature weights, so `sum_i w_i f(x_i)` approximates
//! `int_0^1 x^(a-1) (1-x)^(b-1) f(x) dx` exactly for polynomial `f` up to
//! degree `2n - 1`. Endpoint exponents `a, b > 0` may be fractional, which
//! is what restores spectral accuracy on the ordered-simplex integrals with
//! `(theta_i - theta_{i-1})^(2s-1)` gap weights.
//!
//! Nodes and weights come from the eigendecomposition of the Jacobi matrix
//! (recurrence coefficients per Gautschi's `r_jacobi`); the tridiagonal QL
//! sweep below tracks only the first eigenvector component, which is all the
//! weights need.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::numerics::special::ln_beta;
use crate::{Error, Result};

/// A quadrature rule on `[0, 1]` with the endpoint weight folded in.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Rule for `int_0^1 x^(a-1) (1-x)^(b-1) f(x) dx` with `a, b > 0`.
    pub fn jacobi01(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("quadrature degree must be >= 1"));
        }
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::domain(format!(
                "jacobi exponents must satisfy a, b > 0, got a={a}, b={b}"
            )));
        }
        // Work on [-1, 1] with weight (1-x)^alpha (1+x)^beta.
        let alpha = b - 1.0;
        let beta = a - 1.0;
        let mut diag = vec![0.0f64; n];
        let mut off = vec![0.0f64; n];
        let apb = alpha + beta;
        diag[0] = (beta - alpha) / (apb + 2.0);
        for k in 1..n {
            let kf = k as f64;
            let den = 2.0 * kf + apb;
            diag[k] = (beta * beta - alpha * alpha) / (den * (den + 2.0));
            let b2 = if k == 1 {
                4.0 * (alpha + 1.0) * (beta + 1.0) / ((apb + 2.0) * (apb + 2.0) * (apb + 3.0))
            } else {
                4.0 * kf * (kf + alpha) * (kf + beta) * (kf + apb)
                    / (den * den * (den + 1.0) * (den - 1.0))
            };
            off[k - 1] = b2.sqrt();
        }
        let mut first = vec![0.0f64; n];
        first[0] = 1.0;
        tridiag_ql(&mut diag, &mut off, &mut first)?;

        // mu0 = int_{-1}^{1} (1-x)^alpha (1+x)^beta dx = 2^(alpha+beta+1) B(alpha+1, beta+1)
        let ln_mu0 = (apb + 1.0) * std::f64::consts::LN_2 + ln_beta(alpha + 1.0, beta + 1.0);
        // map to [0,1]: u = (x+1)/2, and fold 2^-(a+b-1) from the weight change
        let scale = (ln_mu0 - (a + b - 1.0) * std::f64::consts::LN_2).exp();

        let mut pairs: Vec<(f64, f64)> = diag
            .iter()
            .zip(first.iter())
            .map(|(&x, &z)| ((x + 1.0) / 2.0, z * z * scale))
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        Ok(GaussRule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    /// Plain Gauss–Legendre on `[0, 1]`.
    pub fn legendre01(n: usize) -> Result<Self> {
        Self::jacobi01(n, 1.0, 1.0)
    }

    /// Rule with weights normalized to total mass one, i.e. quadrature for
    /// the Beta(a, b) expectation.
    pub fn beta_expectation(n: usize, a: f64, b: f64) -> Result<Self> {
        let mut rule = Self::jacobi01(n, a, b)?;
        let total = ln_beta(a, b).exp();
        for w in &mut rule.weights {
            *w /= total;
        }
        Ok(rule)
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Same rule transplanted to `[lo, hi]` with weight
    /// `(x-lo)^(a-1) (hi-x)^(b-1)`; `a + b` must match the constructor.
    pub fn integrate_on(&self, lo: f64, hi: f64, apb: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let len = hi - lo;
        let scale = len.powf(apb - 1.0);
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(|(&x, &w)| scale * w * f(lo + len * x))
            .sum()
    }
}

/// QL with implicit shifts on a symmetric tridiagonal matrix, accumulating
/// only the first row of the orthogonal transform (EISPACK `imtql2` with a
/// 1-row z). On return `diag` holds eigenvalues and `z[i]` the first
/// component of the i-th eigenvector.
fn tridiag_ql(diag: &mut [f64], off: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if n == 1 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::domain("tridiagonal QL failed to converge"));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            for i in (l..m).rev() {
                let mut f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if r == 0.0 && m > l + 1 {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

type RuleKey = (usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<RuleKey, Arc<GaussRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<GaussRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Memoized [`GaussRule::jacobi01`]; rules are reused heavily by the nested
/// simplex integrals and the recurrence evaluator.
pub fn cached_jacobi01(n: usize, a: f64, b: f64) -> Result<Arc<GaussRule>> {
    let key = (n, a.to_bits(), b.to_bits());
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(GaussRule::jacobi01(n, a, b)?);
    cache().lock().unwrap().insert(key, rule.clone());
    Ok(rule)
}

/// Composite Gauss–Legendre over `[lo, hi]` split into `panels` equal cells,
/// `n` nodes per cell.
pub fn composite_legendre(lo: f64, hi: f64, panels: usize, n: usize) -> Result<GaussRule> {
    let base = GaussRule::legendre01(n)?;
    let mut nodes = Vec::with_capacity(panels * n);
    let mut weights = Vec::with_capacity(panels * n);
    let h = (hi - lo) / panels as f64;
    for p in 0..panels {
        let a = lo + p as f64 * h;
        for (&x, &w) in base.nodes.iter().zip(base.weights.iter()) {
            nodes.push(a + h * x);
            weights.push(w * h);
        }
    }
    Ok(GaussRule { nodes, weights })
}
