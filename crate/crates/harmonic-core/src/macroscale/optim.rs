//! Limited-memory BFGS with backtracking line search, plus the latent
//! parameterization of strictly-increasing profiles with pinned endpoints:
//! increments are squared latent variables normalized to the fixed total,
//! so the monotone constraint set maps to an unconstrained search space.

/// Outcome of an L-BFGS minimization.
#[derive(Debug, Clone)]
pub struct LbfgsResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimize `f` with analytic gradient (written into the second argument).
pub fn lbfgs_minimize<F>(
    x0: &[f64],
    mut f: F,
    max_iter: usize,
    gtol: f64,
) -> LbfgsResult
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    const MEMORY: usize = 12;
    const C1: f64 = 1e-4;

    let n = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut value = f(&x, &mut g);

    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();
    let mut rho_hist: Vec<f64> = Vec::new();

    let mut iterations = 0;
    let mut converged = false;
    let mut stall = 0usize;

    while iterations < max_iter {
        let gnorm = g.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        if gnorm <= gtol {
            converged = true;
            break;
        }
        // two-loop recursion for the search direction
        let mut d: Vec<f64> = g.iter().map(|&v| -v).collect();
        let k = s_hist.len();
        let mut alpha = vec![0.0; k];
        for i in (0..k).rev() {
            let a = rho_hist[i] * dot(&s_hist[i], &d);
            alpha[i] = a;
            axpy(-a, &y_hist[i], &mut d);
        }
        if k > 0 {
            let sy = dot(&s_hist[k - 1], &y_hist[k - 1]);
            let yy = dot(&y_hist[k - 1], &y_hist[k - 1]);
            if yy > 0.0 {
                let scale = sy / yy;
                for v in d.iter_mut() {
                    *v *= scale;
                }
            }
        }
        for i in 0..k {
            let b = rho_hist[i] * dot(&y_hist[i], &d);
            axpy(alpha[i] - b, &s_hist[i], &mut d);
        }
        let mut descent = dot(&g, &d);
        if descent >= 0.0 {
            // fall back to steepest descent
            d = g.iter().map(|&v| -v).collect();
            descent = -dot(&g, &g);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        // Armijo backtracking
        let mut step = 1.0;
        let mut x_new = vec![0.0; n];
        let mut g_new = vec![0.0; n];
        let mut value_new;
        let mut ok = false;
        for _ in 0..60 {
            for i in 0..n {
                x_new[i] = x[i] + step * d[i];
            }
            value_new = f(&x_new, &mut g_new);
            if value_new.is_finite() && value_new <= value + C1 * step * descent {
                ok = true;
                // update memory
                let s: Vec<f64> = x_new.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = g_new.iter().zip(g.iter()).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 1e-12 * norm2(&s) * norm2(&y) {
                    if s_hist.len() == MEMORY {
                        s_hist.remove(0);
                        y_hist.remove(0);
                        rho_hist.remove(0);
                    }
                    rho_hist.push(1.0 / sy);
                    s_hist.push(s);
                    y_hist.push(y);
                }
                let delta = (value - value_new).abs();
                x.copy_from_slice(&x_new);
                g.copy_from_slice(&g_new);
                value = value_new;
                if delta <= 1e-16 * (1.0 + value.abs()) {
                    stall += 1;
                } else {
                    stall = 0;
                }
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        if !ok || stall >= 3 {
            converged = g.iter().fold(0.0f64, |a, &v| a.max(v.abs())) <= gtol * 100.0 || stall >= 3;
            break;
        }
    }
    let grad_norm = g.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    if grad_norm <= gtol {
        converged = true;
    }
    LbfgsResult {
        x,
        value,
        grad_norm,
        iterations,
        converged,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x.iter()) {
        *yi += a * xi;
    }
}

/// Strictly-increasing profiles `lo = theta_0 < ... < theta_M = hi`
/// parameterized by latent variables: `d_m = (hi-lo) z_m^2 / sum(z^2)`.
#[derive(Debug, Clone, Copy)]
pub struct MonotoneMap {
    pub lo: f64,
    pub hi: f64,
    pub cells: usize,
}

impl MonotoneMap {
    pub fn new(lo: f64, hi: f64, cells: usize) -> Self {
        assert!(hi > lo && cells >= 1);
        MonotoneMap { lo, hi, cells }
    }

    /// Increments and node values from the latent vector.
    pub fn profile(&self, z: &[f64]) -> (Vec<f64>, Vec<f64>) {
        debug_assert_eq!(z.len(), self.cells);
        let total = self.hi - self.lo;
        let norm: f64 = z.iter().map(|v| v * v).sum();
        let d: Vec<f64> = z.iter().map(|v| total * v * v / norm).collect();
        let mut theta = Vec::with_capacity(self.cells + 1);
        let mut acc = self.lo;
        theta.push(acc);
        for &dm in &d {
            acc += dm;
            theta.push(acc);
        }
        // pin the endpoint exactly
        *theta.last_mut().unwrap() = self.hi;
        (d, theta)
    }

    /// Pull a gradient w.r.t. increments back to the latent variables.
    pub fn pull_back(&self, z: &[f64], d: &[f64], grad_d: &[f64]) -> Vec<f64> {
        let total = self.hi - self.lo;
        let norm: f64 = z.iter().map(|v| v * v).sum();
        let coupled: f64 = grad_d.iter().zip(d.iter()).map(|(g, dm)| g * dm).sum();
        z.iter()
            .zip(grad_d.iter())
            .map(|(&zj, &gj)| 2.0 * zj / norm * (total * gj - coupled))
            .collect()
    }

    /// Latent vector reproducing given increments.
    pub fn latent_for(&self, d: &[f64]) -> Vec<f64> {
        d.iter().map(|&v| v.max(1e-300).sqrt()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn minimizes_rosenbrock() {
        let f = |x: &[f64], g: &mut [f64]| {
            let (a, b) = (x[0], x[1]);
            g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
            g[1] = 200.0 * (b - a * a);
            (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
        };
        let r = lbfgs_minimize(&[-1.2, 1.0], f, 2000, 1e-10);
        assert!(r.converged, "grad norm {}", r.grad_norm);
        assert_relative_eq!(r.x[0], 1.0, epsilon = 1e-7);
        assert_relative_eq!(r.x[1], 1.0, epsilon = 1e-7);
    }

    #[test]
    fn minimizes_high_dimensional_quadratic() {
        let n = 200;
        let f = |x: &[f64], g: &mut [f64]| {
            let mut v = 0.0;
            for i in 0..x.len() {
                let w = 1.0 + i as f64 / 10.0;
                v += 0.5 * w * (x[i] - 1.0) * (x[i] - 1.0);
                g[i] = w * (x[i] - 1.0);
            }
            v
        };
        let r = lbfgs_minimize(&vec![0.0; n], f, 500, 1e-10);
        assert!(r.converged);
        assert!(r.value < 1e-16);
    }

    #[test]
    fn monotone_map_roundtrip_and_gradient() {
        let map = MonotoneMap::new(0.2, 0.8, 5);
        let z = vec![1.0, 0.7, 1.3, 0.5, 1.1];
        let (d, theta) = map.profile(&z);
        assert_relative_eq!(d.iter().sum::<f64>(), 0.6, epsilon = 1e-14);
        assert_eq!(theta[0], 0.2);
        assert_eq!(*theta.last().unwrap(), 0.8);
        assert!(theta.windows(2).all(|w| w[1] > w[0]));

        // finite-difference check of pull_back on a random functional of d
        let loss = |d: &[f64]| -> f64 {
            d.iter()
                .enumerate()
                .map(|(i, &v)| (i as f64 + 1.0) * v * v + v.ln())
                .sum()
        };
        let grad_d: Vec<f64> = d
            .iter()
            .enumerate()
            .map(|(i, &v)| 2.0 * (i as f64 + 1.0) * v + 1.0 / v)
            .collect();
        let gz = map.pull_back(&z, &d, &grad_d);
        let eps = 1e-6;
        for j in 0..z.len() {
            let mut zp = z.clone();
            zp[j] += eps;
            let (dp, _) = map.profile(&zp);
            let mut zm = z.clone();
            zm[j] -= eps;
            let (dm, _) = map.profile(&zm);
            let fd = (loss(&dp) - loss(&dm)) / (2.0 * eps);
            assert_relative_eq!(gz[j], fd, max_relative = 1e-5, epsilon = 1e-8);
        }
    }
}
