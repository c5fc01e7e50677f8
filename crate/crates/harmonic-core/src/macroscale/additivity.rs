//! Additivity principle for the modified pressure and the modified rate
//! function: the unit-interval functional equals the extremum over
//! intermediate reservoir densities of the subinterval contributions.

use serde::Serialize;

use crate::macroscale::pressure::{pressure_variational, VariationalOptions};
use crate::macroscale::rate::rate_function;
use crate::{Error, Result};

/// Both sides of an additivity identity with the optimizing intermediate
/// densities.
#[derive(Debug, Clone, Serialize)]
pub struct AdditivityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub splits: Vec<f64>,
    pub optimal_densities: Vec<f64>,
}

fn check_splits(splits: &[f64]) -> Result<()> {
    if splits.is_empty() {
        return Err(Error::domain("need at least one interior split"));
    }
    let mut prev = 0.0;
    for &x in splits {
        if !(x > prev && x < 1.0) {
            return Err(Error::domain(
                "splits must be strictly increasing inside (0, 1)",
            ));
        }
        prev = x;
    }
    Ok(())
}

/// Modified interval pressure
/// `Ptilde = (b-a) P_unit + 2s (b-a) log((rho_b-rho_a)/(b-a))`, where
/// `P_unit` is the unit-interval variational value of the rescaled field.
fn modified_pressure(
    s: f64,
    rho_a: f64,
    rho_b: f64,
    a: f64,
    b: f64,
    h: &dyn Fn(f64) -> f64,
    opts: &VariationalOptions,
) -> Result<f64> {
    let len = b - a;
    let sol = pressure_variational(s, rho_a, rho_b, |y| h(a + len * y), opts)?;
    Ok(len * sol.value + 2.0 * s * len * ((rho_b - rho_a) / len).ln())
}

fn modified_rate(
    s: f64,
    rho_a: f64,
    rho_b: f64,
    a: f64,
    b: f64,
    rho: &dyn Fn(f64) -> f64,
    opts: &VariationalOptions,
) -> Result<f64> {
    let len = b - a;
    let sol = rate_function(s, rho_a, rho_b, |y| rho(a + len * y), opts)?;
    Ok(len * sol.value - 2.0 * s * len * ((rho_b - rho_a) / len).ln())
}

/// Golden-section extremum of a 1-D function on `[lo, hi]`.
fn golden_extremum(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    maximize: bool,
    tol: f64,
) -> Result<(f64, f64)> {
    const PHI: f64 = 0.618_033_988_749_894_8;
    let sign = if maximize { 1.0 } else { -1.0 };
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - PHI * (b - a);
    let mut x2 = a + PHI * (b - a);
    let mut f1 = sign * f(x1)?;
    let mut f2 = sign * f(x2)?;
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + PHI * (b - a);
            f2 = sign * f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - PHI * (b - a);
            f1 = sign * f(x1)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

fn coordinate_extremum(
    splits: &[f64],
    rho_l: f64,
    rho_r: f64,
    maximize: bool,
    mut total: impl FnMut(&[f64]) -> Result<f64>,
) -> Result<(Vec<f64>, f64)> {
    let kappa = splits.len() + 1;
    // initialize interior densities on the straight line
    let mut dens: Vec<f64> = splits
        .iter()
        .map(|&x| rho_l + (rho_r - rho_l) * x)
        .collect();
    let margin = 1e-7 * (rho_r - rho_l);
    let mut value = total(&dens)?;
    for _sweep in 0..10 {
        let before = value;
        for i in 0..kappa - 1 {
            let lo = if i == 0 { rho_l } else { dens[i - 1] } + margin;
            let hi = if i + 2 == kappa {
                rho_r
            } else {
                dens[i + 1]
            } - margin;
            if hi <= lo {
                continue;
            }
            let (best_x, best_v) = golden_extremum(
                |x| {
                    let mut trial = dens.clone();
                    trial[i] = x;
                    total(&trial)
                },
                lo,
                hi,
                maximize,
                1e-10 * (rho_r - rho_l),
            )?;
            let improves = if maximize {
                best_v > value
            } else {
                best_v < value
            };
            if improves {
                dens[i] = best_x;
                value = best_v;
            }
        }
        if (value - before).abs() < 1e-12 * (1.0 + value.abs()) {
            break;
        }
    }
    Ok((dens, value))
}

/// Pressure additivity: the modified unit-interval pressure against the
/// sup over intermediate densities of the subinterval sum.
pub fn additivity_check_pressure(
    s: f64,
    rho_l: f64,
    rho_r: f64,
    h: &dyn Fn(f64) -> f64,
    splits: &[f64],
    opts: &VariationalOptions,
) -> Result<AdditivityReport> {
    check_splits(splits)?;
    let lhs = modified_pressure(s, rho_l, rho_r, 0.0, 1.0, h, opts)?;
    let mut edges = vec![0.0];
    edges.extend_from_slice(splits);
    edges.push(1.0);
    let total = |dens: &[f64]| -> Result<f64> {
        let mut bounds = vec![rho_l];
        bounds.extend_from_slice(dens);
        bounds.push(rho_r);
        let mut acc = 0.0;
        for i in 0..edges.len() - 1 {
            acc += modified_pressure(
                s,
                bounds[i],
                bounds[i + 1],
                edges[i],
                edges[i + 1],
                h,
                opts,
            )?;
        }
        Ok(acc)
    };
    let (optimal_densities, rhs) = coordinate_extremum(splits, rho_l, rho_r, true, total)?;
    Ok(AdditivityReport {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
        splits: splits.to_vec(),
        optimal_densities,
    })
}

/// Rate-function additivity: inf over intermediate densities.
pub fn additivity_check_rate(
    s: f64,
    rho_l: f64,
    rho_r: f64,
    rho: &dyn Fn(f64) -> f64,
    splits: &[f64],
    opts: &VariationalOptions,
) -> Result<AdditivityReport> {
    check_splits(splits)?;
    let lhs = modified_rate(s, rho_l, rho_r, 0.0, 1.0, rho, opts)?;
    let mut edges = vec![0.0];
    edges.extend_from_slice(splits);
    edges.push(1.0);
    let total = |dens: &[f64]| -> Result<f64> {
        let mut bounds = vec![rho_l];
        bounds.extend_from_slice(dens);
        bounds.push(rho_r);
        let mut acc = 0.0;
        for i in 0..edges.len() - 1 {
            acc += modified_rate(
                s,
                bounds[i],
                bounds[i + 1],
                edges[i],
                edges[i + 1],
                rho,
                opts,
            )?;
        }
        Ok(acc)
    };
    let (optimal_densities, rhs) = coordinate_extremum(splits, rho_l, rho_r, false, total)?;
    Ok(AdditivityReport {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
        splits: splits.to_vec(),
        optimal_densities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macroscale::pressure::pressure_constant_closed_form;
    use approx::assert_relative_eq;

    fn opts(cells: usize, starts: usize) -> VariationalOptions {
        VariationalOptions {
            cells,
            starts,
            ..Default::default()
        }
    }

    #[test]
    fn zero_field_single_split_closed_form_optimum() {
        // h = 0: Ptilde = 2s x log((theta-rho_l)/x) + ..., optimum on the line
        let (s, rl, rr) = (0.5, 0.2, 0.8);
        let r = additivity_check_pressure(s, rl, rr, &|_| 0.0, &[0.3], &opts(120, 2)).unwrap();
        assert!(r.gap < 1e-8, "gap {}", r.gap);
        let want = rl + 0.3 * (rr - rl);
        assert_relative_eq!(r.optimal_densities[0], want, epsilon = 1e-5);
        assert_relative_eq!(r.lhs, 2.0 * s * (rr - rl).ln(), epsilon = 1e-8);
    }

    #[test]
    fn constant_field_two_split_matches_closed_form() {
        let (s, rl, rr) = (0.5, 0.2, 0.8);
        let h = 0.4;
        let r = additivity_check_pressure(s, rl, rr, &move |_| h, &[0.5], &opts(400, 2)).unwrap();
        // closed-form lhs; the piecewise-linear class gap is O(cells^-2)
        let lhs_cf = pressure_constant_closed_form(s, rl, rr, 0.0, 1.0, h).unwrap()
            + 2.0 * s * (rr - rl).ln();
        assert_relative_eq!(r.lhs, lhs_cf, epsilon = 5e-7);
        assert!(r.gap < 1e-6, "gap {}", r.gap);
    }

    #[test]
    fn rate_additivity_typical_profile() {
        let (s, rl, rr) = (0.5, 0.2, 0.8);
        let rho = move |x: f64| 2.0 * s * (rl + (rr - rl) * x);
        let r = additivity_check_rate(s, rl, rr, &rho, &[0.4], &opts(120, 2)).unwrap();
        assert!(r.gap < 1e-6, "gap {}", r.gap);
        // minimizer sits on the straight line
        assert_relative_eq!(r.optimal_densities[0], rl + 0.4 * (rr - rl), epsilon = 1e-4);
    }

    #[test]
    fn rejects_bad_splits() {
        let o = opts(40, 1);
        assert!(additivity_check_pressure(0.5, 0.2, 0.8, &|_| 0.0, &[], &o).is_err());
        assert!(additivity_check_pressure(0.5, 0.2, 0.8, &|_| 0.0, &[0.7, 0.3], &o).is_err());
        assert!(additivity_check_pressure(0.5, 0.2, 0.8, &|_| 0.0, &[1.2], &o).is_err());
    }
}
