//! Density large-deviation rate function by contraction over monotone
//! potential profiles, and the Legendre transform of the pressure (whose
//! gap against the rate function witnesses non-convexity).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::macroscale::optim::{lbfgs_minimize, MonotoneMap};
use crate::macroscale::pressure::{PressureObjective, VariationalOptions, GL_W, GL_X};
use crate::macroscale::{ProfileGrid, ProfileKind};
use crate::{Error, Result};

/// Result of the rate-function minimization.
#[derive(Debug, Clone, Serialize)]
pub struct RateSolution {
    pub value: f64,
    pub theta: ProfileGrid,
    pub grad_norm: f64,
    pub converged: bool,
    pub local_values: Vec<f64>,
}

/// Relative-entropy integrand of the rate functional at one point, with
/// the `0 log 0 = 0` convention.
#[inline]
fn entropy_term(two_s: f64, rho: f64, theta: f64) -> f64 {
    let r = rho / two_s;
    let mut v = (1.0 + r) * ((1.0 + theta).ln() - (1.0 + r).ln());
    if r > 0.0 {
        v += r * (r.ln() - theta.ln());
    }
    v
}

#[inline]
fn entropy_term_dtheta(two_s: f64, rho: f64, theta: f64) -> f64 {
    let r = rho / two_s;
    (1.0 + r) / (1.0 + theta) - r / theta
}

/// The exact piecewise-linear discrete rate objective `I(rho, theta) + J(theta)`.
pub(crate) struct RateObjective<'a> {
    pub s: f64,
    pub map: MonotoneMap,
    pub rho: &'a dyn Fn(f64) -> f64,
}

impl RateObjective<'_> {
    pub fn eval(&self, z: &[f64], grad: &mut [f64]) -> f64 {
        let m = self.map.cells;
        let dx = 1.0 / m as f64;
        let total = self.map.hi - self.map.lo;
        let (d, theta) = self.map.profile(z);
        let two_s = 2.0 * self.s;
        let mut value = 0.0;
        let mut g_theta = vec![0.0f64; m + 1];
        for cell in 0..m {
            let x0 = cell as f64 * dx;
            for q in 0..4 {
                let lam = 0.5 * (1.0 + GL_X[q]);
                let w = 0.5 * dx * GL_W[q];
                let x = x0 + lam * dx;
                let rho = (self.rho)(x).max(0.0);
                let th = theta[cell] * (1.0 - lam) + theta[cell + 1] * lam;
                value += w * entropy_term(two_s, rho, th);
                let dv = w * entropy_term_dtheta(two_s, rho, th);
                g_theta[cell] += dv * (1.0 - lam);
                g_theta[cell + 1] += dv * lam;
            }
        }
        let mut g_d = vec![0.0f64; m];
        for (i, &di) in d.iter().enumerate() {
            // J term: -sum dx log(d/(dx total))
            value -= dx * (di / (dx * total)).ln();
            g_d[i] = -dx / di;
        }
        let mut suffix = 0.0;
        for k in (1..=m).rev() {
            suffix += g_theta[k];
            g_d[k - 1] += suffix;
        }
        let gz = self.map.pull_back(z, &d, &g_d);
        for (g, v) in grad.iter_mut().zip(gz.iter()) {
            *g = two_s * v;
        }
        two_s * value
    }
}

/// Grid evaluation of `I(rho, theta) + J(theta)` with trapezoid quadrature
/// and centered finite differences, per the grid contracts.
pub fn rate_functional(
    s: f64,
    rho_l: f64,
    rho_r: f64,
    rho: &ProfileGrid,
    theta: &ProfileGrid,
) -> Result<f64> {
    if rho.values.len() != theta.values.len() {
        return Err(Error::domain("density and potential grids must match"));
    }
    if theta.kind != ProfileKind::Potential {
        return Err(Error::domain("theta must be a potential profile"));
    }
    let width = rho_r - rho_l;
    let two_s = 2.0 * s;
    let weights = theta.trapezoid_weights();
    let slope = theta.derivative();
    let mut acc = 0.0;
    for i in 0..theta.values.len() {
        if slope[i] <= 0.0 {
            return Err(Error::domain("theta must be strictly increasing"));
        }
        acc += weights[i]
            * (entropy_term(two_s, rho.values[i].max(0.0), theta.values[i])
                - (slope[i] / width).ln());
    }
    Ok(two_s * acc)
}

/// Minimize the rate functional over admissible potentials; multi-start.
pub fn rate_function(
    s: f64,
    rho_l: f64,
    rho_r: f64,
    rho: impl Fn(f64) -> f64,
    opts: &VariationalOptions,
) -> Result<RateSolution> {
    if !(rho_r > rho_l) {
        return Err(Error::domain("rate function requires rho_l < rho_r"));
    }
    let map = MonotoneMap::new(rho_l, rho_r, opts.cells);
    let objective = RateObjective { s, map, rho: &rho };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut inits: Vec<Vec<f64>> = vec![vec![1.0; opts.cells]];
    // start matching theta = rho/(2s) where admissible
    let mut guided = Vec::with_capacity(opts.cells);
    let mut prev = rho_l;
    let mut ok = true;
    for i in 1..=opts.cells {
        let x = i as f64 / opts.cells as f64;
        let target = if i == opts.cells {
            rho_r
        } else {
            (rho(x) / (2.0 * s)).clamp(rho_l + 1e-9, rho_r - 1e-9)
        };
        if target <= prev {
            ok = false;
            break;
        }
        guided.push(target - prev);
        prev = target;
    }
    if ok {
        inits.push(map.latent_for(&guided));
    }
    while inits.len() < opts.starts {
        inits.push((0..opts.cells).map(|_| rng.random_range(0.35..1.0)).collect());
    }

    let mut best: Option<crate::macroscale::optim::LbfgsResult> = None;
    let mut local_values = Vec::new();
    for z0 in inits {
        let r = lbfgs_minimize(&z0, |z, g| objective.eval(z, g), opts.max_iter, opts.gtol);
        if !r.value.is_finite() {
            continue;
        }
        local_values.push(r.value);
        let better = best.as_ref().is_none_or(|b| r.value < b.value);
        if better {
            best = Some(r);
        }
    }
    let run = best.ok_or_else(|| {
        Error::OptimizerNonConvergence("no admissible start for the rate problem".into())
    })?;
    let (_, theta) = map.profile(&run.x);
    Ok(RateSolution {
        value: run.value,
        theta: ProfileGrid::new(0.0, 1.0, theta, ProfileKind::Potential)?,
        grad_norm: run.grad_norm,
        converged: run.converged,
        local_values,
    })
}

/// Legendre transform of the pressure at a density profile:
/// `sup_h [ <h, rho> - P(h) ]` by projected gradient ascent with the
/// envelope gradient `rho - rho_h`, where `rho_h` is the typical profile
/// of the tilted inner maximizer.
pub fn legendre_transform_pressure(
    s: f64,
    rho_l: f64,
    rho_r: f64,
    rho: &ProfileGrid,
    opts: &VariationalOptions,
    max_outer: usize,
) -> Result<f64> {
    let cells = rho.cells();
    let h_cap = rho_r.recip().ln_1p() - 1e-6;
    let h_floor = -40.0;
    let weights = rho.trapezoid_weights();

    let map = MonotoneMap::new(rho_l, rho_r, cells);
    let mut warm = vec![1.0f64; cells];
    let mut h_nodes = vec![0.0f64; cells + 1];

    // inner solve: returns P(h) and the envelope gradient dP/dh at nodes
    let inner = |h_nodes: &[f64], warm: &mut Vec<f64>| -> (f64, Vec<f64>) {
        let grid = ProfileGrid {
            a: 0.0,
            b: 1.0,
            values: h_nodes.to_vec(),
            kind: ProfileKind::Field,
        };
        let h_fn = |x: f64| grid.eval(x);
        let objective = PressureObjective {
            s,
            map,
            h: &h_fn,
        };
        let run = lbfgs_minimize(warm, |z, g| objective.eval(z, g), opts.max_iter, opts.gtol);
        *warm = run.x.clone();
        let (_, theta) = map.profile(&run.x);
        // dP/dh_j = 2s * int (theta e^h / (1+u theta)) hat_j(x) dx
        let dx = 1.0 / cells as f64;
        let mut g = vec![0.0f64; cells + 1];
        for cell in 0..cells {
            for q in 0..4 {
                let lam = 0.5 * (1.0 + GL_X[q]);
                let w = 0.5 * dx * GL_W[q];
                let x = cell as f64 * dx + lam * dx;
                let hh = grid.eval(x);
                let eh = hh.exp();
                let th = theta[cell] * (1.0 - lam) + theta[cell + 1] * lam;
                let dens = 2.0 * s * th * eh / (1.0 + (1.0 - eh) * th);
                g[cell] += w * dens * (1.0 - lam);
                g[cell + 1] += w * dens * lam;
            }
        }
        (-run.value, g)
    };

    let mut value = f64::NEG_INFINITY;
    let mut step = 1.0;
    for _ in 0..max_outer {
        let (p, dp) = inner(&h_nodes, &mut warm);
        let current: f64 = h_nodes
            .iter()
            .zip(weights.iter().zip(rho.values.iter()))
            .map(|(&h, (&w, &r))| h * w * r)
            .sum::<f64>()
            - p;
        let grad: Vec<f64> = weights
            .iter()
            .zip(rho.values.iter())
            .zip(dp.iter())
            .map(|((&w, &r), &g)| w * r - g)
            .collect();
        // backtracking projected ascent
        let mut improved = false;
        let mut try_step = step * 2.0;
        while try_step > 1e-13 {
            let trial: Vec<f64> = h_nodes
                .iter()
                .zip(grad.iter())
                .map(|(&h, &g)| (h + try_step * g).clamp(h_floor, h_cap))
                .collect();
            let (p_t, _) = inner(&trial, &mut warm.clone());
            let v_t: f64 = trial
                .iter()
                .zip(weights.iter().zip(rho.values.iter()))
                .map(|(&h, (&w, &r))| h * w * r)
                .sum::<f64>()
                - p_t;
            if v_t > current + 1e-14 {
                h_nodes = trial;
                value = v_t;
                step = try_step;
                improved = true;
                break;
            }
            try_step *= 0.5;
        }
        if !improved {
            value = value.max(current);
            break;
        }
    }
    if !value.is_finite() {
        return Err(Error::OptimizerNonConvergence(
            "legendre transform made no progress".into(),
        ));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macroscale::typical_density;
    use approx::assert_relative_eq;

    fn opts(cells: usize, starts: usize) -> VariationalOptions {
        VariationalOptions {
            cells,
            starts,
            ..Default::default()
        }
    }

    #[test]
    fn typical_profile_has_zero_rate_linear_minimizer() {
        let (s, rl, rr) = (0.5, 0.2, 0.8);
        let sol = rate_function(s, rl, rr, |x| 2.0 * s * (rl + (rr - rl) * x), &opts(160, 2))
            .unwrap();
        assert!(sol.value.abs() < 1e-10, "I(rho_bar) = {}", sol.value);
        for (i, &t) in sol.theta.values.iter().enumerate() {
            let x = i as f64 / 160.0;
            assert_relative_eq!(t, rl + (rr - rl) * x, epsilon = 1e-5);
        }
    }

    #[test]
    fn functional_vanishes_exactly_on_matched_pair() {
        // rho = 2s theta with linear theta: entropy and path terms both vanish
        let (s, rl, rr) = (0.65, 0.2, 0.8);
        let theta = ProfileGrid::linear(0.0, 1.0, 100, rl, rr, ProfileKind::Potential).unwrap();
        let rho = ProfileGrid::from_fn(0.0, 1.0, 100, ProfileKind::Density, |x| {
            2.0 * s * (rl + (rr - rl) * x)
        })
        .unwrap();
        let v = rate_functional(s, rl, rr, &rho, &theta).unwrap();
        assert!(v.abs() < 1e-12);
        // rho = 2s theta for a non-linear admissible theta: only J survives
        let theta2 = ProfileGrid::from_fn(0.0, 1.0, 100, ProfileKind::Potential, |x| {
            rl + (rr - rl) * x * x * 0.5 + (rr - rl) * 0.5 * x
        })
        .unwrap();
        let rho2 = ProfileGrid::from_fn(0.0, 1.0, 100, ProfileKind::Density, |x| {
            2.0 * s * theta2.eval(x)
        })
        .unwrap();
        let v2 = rate_functional(s, rl, rr, &rho2, &theta2).unwrap();
        let j_only: f64 = {
            let w = theta2.trapezoid_weights();
            let sl = theta2.derivative();
            -2.0
                * s
                * w.iter()
                    .zip(sl.iter())
                    .map(|(&wi, &d)| wi * (d / (rr - rl)).ln())
                    .sum::<f64>()
        };
        assert_relative_eq!(v2, j_only, max_relative = 1e-10);
        assert!(v2 > 0.0);
    }

    #[test]
    fn perturbed_profiles_cost_positive_rate() {
        let (s, rl, rr) = (0.5, 0.2, 0.8);
        let bump = |x: f64| (std::f64::consts::PI * x).sin();
        let norm: f64 = 2.0 / std::f64::consts::PI; // L1 norm of sin on [0,1]
        let amp = 0.1 / norm;
        for sign in [1.0, -1.0] {
            let sol = rate_function(
                s,
                rl,
                rr,
                move |x| (2.0 * s * (rl + (rr - rl) * x) + sign * amp * bump(x)).max(0.0),
                &opts(160, 4),
            )
            .unwrap();
            assert!(sol.value > 1e-3, "perturbed I = {}", sol.value);
        }
    }

    #[test]
    fn constant_profile_costs_positive_rate() {
        let (s, rl, rr) = (0.5, 0.2, 0.8);
        let sol = rate_function(s, rl, rr, |_| 0.5, &opts(120, 4)).unwrap();
        assert!(sol.value > 1e-3);
    }

    #[test]
    fn rate_gradient_matches_finite_differences() {
        use rand::Rng;
        use rand::SeedableRng;
        let map = MonotoneMap::new(0.2, 0.8, 20);
        let rho = |x: f64| 0.6 + 0.3 * (3.0 * x).cos();
        let obj = RateObjective {
            s: 0.5,
            map,
            rho: &rho,
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let z: Vec<f64> = (0..20).map(|_| rng.random_range(0.4..1.2)).collect();
        let mut g = vec![0.0; 20];
        obj.eval(&z, &mut g);
        let eps = 1e-6;
        for j in [0usize, 9, 19] {
            let mut zp = z.clone();
            zp[j] += eps;
            let mut zm = z.clone();
            zm[j] -= eps;
            let mut scratch = vec![0.0; 20];
            let fd = (obj.eval(&zp, &mut scratch) - obj.eval(&zm, &mut scratch)) / (2.0 * eps);
            assert_relative_eq!(g[j], fd, max_relative = 1e-6, epsilon = 1e-9);
        }
    }

    #[test]
    fn legendre_transform_vanishes_at_typical_profile() {
        let (s, rl, rr) = (0.5, 0.2, 0.8);
        let rho = typical_density(s, rl, rr, 60);
        let lp = legendre_transform_pressure(s, rl, rr, &rho, &opts(60, 1), 40).unwrap();
        assert!(lp.abs() < 1e-6, "LP(rho_bar) = {lp}");
    }
}
