//! Pressure of the steady state: variational formula over monotone
//! potential profiles, constant-field closed form, and the finite-volume
//! trend toward the macroscopic limit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::macroscale::optim::{lbfgs_minimize, MonotoneMap};
use crate::macroscale::{ProfileGrid, ProfileKind};
use crate::mgf::constant::phi_constant_recurrence;
use crate::{Error, Result};

/// 4-point Gauss–Legendre on [-1, 1]; enough to make the per-cell pressure
/// integral exact far beyond the piecewise-linear class error.
pub(crate) const GL_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
pub(crate) const GL_W: [f64; 4] = [
    0.347_854_845_137_453_8,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_8,
];

/// Optimizer knobs for the variational problems.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VariationalOptions {
    pub cells: usize,
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub gtol: f64,
}

impl Default for VariationalOptions {
    fn default() -> Self {
        VariationalOptions {
            cells: 400,
            starts: 8,
            seed: 0,
            max_iter: 600,
            gtol: 1e-11,
        }
    }
}

/// Result of a variational pressure maximization.
#[derive(Debug, Clone, Serialize)]
pub struct PressureSolution {
    pub value: f64,
    pub theta: ProfileGrid,
    pub grad_norm: f64,
    pub converged: bool,
    /// values of all local optima found across the starts
    pub local_values: Vec<f64>,
}

/// The exact (piecewise-linear) discrete pressure objective over the unit
/// interval: cell-wise Gauss quadrature of the density term plus the exact
/// increment entropy of the order-statistics path term.
pub(crate) struct PressureObjective<'a> {
    pub s: f64,
    pub map: MonotoneMap,
    pub h: &'a dyn Fn(f64) -> f64,
}

impl PressureObjective<'_> {
    /// Negated objective (for minimization) and its latent gradient.
    pub fn eval(&self, z: &[f64], grad: &mut [f64]) -> f64 {
        let m = self.map.cells;
        let dx = 1.0 / m as f64;
        let total = self.map.hi - self.map.lo;
        let (d, theta) = self.map.profile(z);
        let mut value = 0.0;
        let mut g_theta = vec![0.0f64; m + 1];
        for cell in 0..m {
            let x0 = cell as f64 * dx;
            for q in 0..4 {
                let lam = 0.5 * (1.0 + GL_X[q]);
                let w = 0.5 * dx * GL_W[q];
                let x = x0 + lam * dx;
                let u = -(self.h)(x).exp_m1();
                let th = theta[cell] * (1.0 - lam) + theta[cell + 1] * lam;
                let q_arg = 1.0 + u * th;
                if q_arg <= 0.0 {
                    // inadmissible point: infinite barrier
                    for g in grad.iter_mut() {
                        *g = 0.0;
                    }
                    return f64::INFINITY;
                }
                value -= w * q_arg.ln();
                let dv = -w * u / q_arg;
                g_theta[cell] += dv * (1.0 - lam);
                g_theta[cell + 1] += dv * lam;
            }
        }
        let mut g_d = vec![0.0f64; m];
        for (i, &di) in d.iter().enumerate() {
            value += dx * (di / (dx * total)).ln();
            g_d[i] = dx / di;
        }
        // theta_k depends on d_m for k >= m+1
        let mut suffix = 0.0;
        for k in (1..=m).rev() {
            suffix += g_theta[k];
            g_d[k - 1] += suffix;
        }
        let two_s = 2.0 * self.s;
        let gz = self.map.pull_back(z, &d, &g_d);
        for (g, v) in grad.iter_mut().zip(gz.iter()) {
            *g = -two_s * v;
        }
        -two_s * value
    }
}

/// Maximize the pressure functional over strictly-increasing potentials
/// with pinned endpoints, multi-start quasi-Newton.
pub fn pressure_variational(
    s: f64,
    rho_l: f64,
    rho_r: f64,
    h: impl Fn(f64) -> f64,
    opts: &VariationalOptions,
) -> Result<PressureSolution> {
    if !(rho_r > rho_l) {
        return Err(Error::domain("variational pressure requires rho_l < rho_r"));
    }
    let map = MonotoneMap::new(rho_l, rho_r, opts.cells);
    let objective = PressureObjective { s, map, h: &h };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut inits: Vec<Vec<f64>> = vec![vec![1.0; opts.cells]];
    // increments matching the constant-field optimal profile of the mean field
    let h_mean: f64 = (0..=64)
        .map(|i| h(i as f64 / 64.0))
        .sum::<f64>()
        / 65.0;
    if let Ok(star) = theta_star_increments(rho_l, rho_r, h_mean, opts.cells) {
        inits.push(map.latent_for(&star));
    }
    while inits.len() < opts.starts {
        inits.push((0..opts.cells).map(|_| rng.random_range(0.35..1.0)).collect());
    }

    let mut best: Option<(f64, crate::macroscale::optim::LbfgsResult)> = None;
    let mut local_values = Vec::new();
    for z0 in inits {
        let r = lbfgs_minimize(
            &z0,
            |z, g| objective.eval(z, g),
            opts.max_iter,
            opts.gtol,
        );
        if !r.value.is_finite() {
            continue;
        }
        local_values.push(-r.value);
        let better = match &best {
            Some((v, _)) => r.value < *v,
            None => true,
        };
        if better {
            best = Some((r.value, r));
        }
    }
    let (_, run) = best.ok_or_else(|| {
        Error::OptimizerNonConvergence("no admissible start for the pressure problem".into())
    })?;
    let (_, theta) = map.profile(&run.x);
    Ok(PressureSolution {
        value: -run.value,
        theta: ProfileGrid::new(0.0, 1.0, theta, ProfileKind::Potential)?,
        grad_norm: run.grad_norm,
        converged: run.converged,
        local_values,
    })
}

fn theta_star_increments(rho_l: f64, rho_r: f64, h: f64, cells: usize) -> Result<Vec<f64>> {
    let mut prev = rho_l;
    let mut out = Vec::with_capacity(cells);
    for i in 1..=cells {
        let x = i as f64 / cells as f64;
        let v = theta_star(rho_l, rho_r, h, x)?;
        if !(v > prev) {
            return Err(Error::domain("theta_star not increasing"));
        }
        out.push(v - prev);
        prev = v;
    }
    Ok(out)
}

/// Optimal constant-field potential profile; the `h -> 0` limit is the
/// linear interpolation.
pub fn theta_star(rho_l: f64, rho_r: f64, h: f64, x: f64) -> Result<f64> {
    let u = -h.exp_m1();
    let (al, ar) = (rho_l * u + 1.0, rho_r * u + 1.0);
    if al <= 0.0 || ar <= 0.0 {
        return Err(Error::domain("theta_star outside admissible field domain"));
    }
    if u.abs() < 1e-10 {
        return Ok(rho_l + (rho_r - rho_l) * x);
    }
    Ok((al * (x * (ar.ln() - al.ln())).exp() - 1.0) / u)
}

/// Grid evaluation of `P(h, theta) - J(theta)` with trapezoid quadrature
/// and centered finite differences (one-sided at the ends).
pub fn pressure_functional(
    s: f64,
    rho_l: f64,
    rho_r: f64,
    h: &ProfileGrid,
    theta: &ProfileGrid,
) -> Result<f64> {
    if h.values.len() != theta.values.len() {
        return Err(Error::domain("field and potential grids must match"));
    }
    if theta.kind != ProfileKind::Potential {
        return Err(Error::domain("theta must be a potential profile"));
    }
    let tol = 1e-9 * (1.0 + rho_r.abs());
    if (theta.values[0] - rho_l).abs() > tol
        || (theta.values.last().unwrap() - rho_r).abs() > tol
    {
        return Err(Error::domain(
            "potential endpoints must match the reservoir densities",
        ));
    }
    let width = rho_r - rho_l;
    let weights = theta.trapezoid_weights();
    let slope = theta.derivative();
    let mut acc = 0.0;
    for i in 0..theta.values.len() {
        let u = -h.values[i].exp_m1();
        let q = 1.0 + u * theta.values[i];
        if q <= 0.0 {
            return Err(Error::domain(format!(
                "inadmissible field at node {i}: 1+(1-e^h)theta = {q}"
            )));
        }
        if slope[i] <= 0.0 {
            return Err(Error::domain("theta must be strictly increasing"));
        }
        acc += weights[i] * (-q.ln() + (slope[i] / width).ln());
    }
    Ok(2.0 * s * acc)
}

/// Closed-form constant-field pressure of the interval `[a, b]` with
/// boundary densities `rho_a < rho_b`; `h -> 0` evaluates by series.
pub fn pressure_constant_closed_form(
    s: f64,
    rho_a: f64,
    rho_b: f64,
    a: f64,
    b: f64,
    h: f64,
) -> Result<f64> {
    if !(rho_b > rho_a) || !(b > a) {
        return Err(Error::domain(
            "closed form needs rho_a < rho_b and a < b",
        ));
    }
    let u = -h.exp_m1();
    let (ql, qr) = (1.0 + u * rho_a, 1.0 + u * rho_b);
    if ql <= 0.0 || qr <= 0.0 {
        return Err(Error::domain("field outside the admissible domain"));
    }
    let width = rho_b - rho_a;
    let arg = if u.abs() < 1e-6 {
        // log-ratio / (width u) expanded in u; error O(u^3)
        let m1 = (rho_a + rho_b) / 2.0;
        let m2 = (rho_a * rho_a + rho_a * rho_b + rho_b * rho_b) / 3.0;
        (1.0 - m1 * u + m2 * u * u).ln()
    } else {
        (((rho_b * u).ln_1p() - (rho_a * u).ln_1p()) / (width * u)).ln()
    };
    Ok(2.0 * s * (b - a) * arg)
}

/// One row of the finite-volume pressure trend.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrendRow {
    pub n_sites: usize,
    /// `(1/N) log Psi_N^(1)(h)` by the recurrence route
    pub finite: f64,
    /// macroscopic closed-form limit
    pub limit: f64,
    pub gap: f64,
}

/// `(1/N) log Psi_N^(1)(h)` against the closed-form limit for a family of
/// system sizes, constant field `h`.
pub fn finite_pressure_trend(
    s: f64,
    rho_l: f64,
    rho_r: f64,
    h: f64,
    sizes: &[usize],
) -> Result<Vec<TrendRow>> {
    let u = -h.exp_m1();
    let den = 1.0 + rho_r * u;
    if den <= 0.0 {
        return Err(Error::domain("field outside the admissible domain"));
    }
    let c = (rho_r - rho_l) * u / den;
    if !(0.0..1.0).contains(&c) {
        return Err(Error::domain(format!(
            "recurrence route requires 0 <= c < 1, got c = {c}; use h <= 0"
        )));
    }
    let limit = pressure_constant_closed_form(s, rho_l, rho_r, 0.0, 1.0, h)?;
    sizes
        .iter()
        .map(|&n| {
            let (phi, _) = phi_constant_recurrence(s, n, c, 64, 80)?;
            let finite = phi.ln() / n as f64 - 2.0 * s * den.ln();
            Ok(TrendRow {
                n_sites: n,
                finite,
                limit,
                gap: finite - limit,
            })
        })
        .collect()
}

/// Sup-norm of the constant-field Euler–Lagrange residual
/// `(1-e^h)/(1+(1-e^h)theta) - theta''/(theta')^2` on the interior nodes.
pub fn euler_lagrange_residual(h: f64, theta: &ProfileGrid) -> f64 {
    let u = -h.exp_m1();
    let dx = theta.dx();
    let v = &theta.values;
    let mut worst = 0.0f64;
    for i in 1..v.len() - 1 {
        let tp = (v[i + 1] - v[i - 1]) / (2.0 * dx);
        let tpp = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (dx * dx);
        let r = u / (1.0 + u * v[i]) - tpp / (tp * tp);
        worst = worst.max(r.abs());
    }
    worst
}
