//! Macroscopic functionals of the harmonic process: transport
//! coefficients, the pressure (variational and closed form), the density
//! large-deviation rate function obtained by contraction over monotone
//! potential profiles, and the additivity principle for both.

pub mod additivity;
pub mod optim;
pub mod pressure;
pub mod rate;

pub use additivity::{additivity_check_pressure, additivity_check_rate, AdditivityReport};
pub use pressure::{
    finite_pressure_trend, pressure_constant_closed_form, pressure_functional,
    pressure_variational, theta_star, PressureSolution, TrendRow, VariationalOptions,
};
pub use rate::{legendre_transform_pressure, rate_function, rate_functional, RateSolution};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Macroscopic transport coefficients: constant diffusivity `1/(2s)` and
/// convex quadratic mobility `(rho/2s)(1 + rho/2s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransportCoefficients {
    pub diffusivity: f64,
    two_s: f64,
}

impl TransportCoefficients {
    pub fn mobility(&self, rho: f64) -> f64 {
        (rho / self.two_s) * (1.0 + rho / self.two_s)
    }
}

pub fn transport_coefficients(s: f64) -> Result<TransportCoefficients> {
    if !(s > 0.0) {
        return Err(Error::domain("spin must be positive"));
    }
    Ok(TransportCoefficients {
        diffusivity: 1.0 / (2.0 * s),
        two_s: 2.0 * s,
    })
}

/// What a sampled profile represents; drives the validation rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    Field,
    Potential,
    Density,
}

/// A function on `[a, b]` sampled on a uniform grid, with linear
/// interpolation between nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileGrid {
    pub a: f64,
    pub b: f64,
    pub values: Vec<f64>,
    pub kind: ProfileKind,
}

impl ProfileGrid {
    pub fn new(a: f64, b: f64, values: Vec<f64>, kind: ProfileKind) -> Result<Self> {
        if values.len() < 2 || !(b > a) {
            return Err(Error::domain("profile needs b > a and at least 2 nodes"));
        }
        let grid = ProfileGrid { a, b, values, kind };
        grid.validate()?;
        Ok(grid)
    }

    pub fn from_fn(
        a: f64,
        b: f64,
        cells: usize,
        kind: ProfileKind,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let values = (0..=cells)
            .map(|i| f(a + (b - a) * i as f64 / cells as f64))
            .collect();
        Self::new(a, b, values, kind)
    }

    /// Linear profile between two endpoint values.
    pub fn linear(a: f64, b: f64, cells: usize, lo: f64, hi: f64, kind: ProfileKind) -> Result<Self> {
        Self::from_fn(a, b, cells, kind, |x| {
            lo + (hi - lo) * (x - a) / (b - a)
        })
    }

    fn validate(&self) -> Result<()> {
        match self.kind {
            ProfileKind::Potential => {
                if !self.values.windows(2).all(|w| w[1] > w[0]) {
                    return Err(Error::domain(
                        "potential profiles must be strictly increasing",
                    ));
                }
            }
            ProfileKind::Density => {
                if self.values.iter().any(|&v| v < 0.0) {
                    return Err(Error::domain("density profiles must be nonnegative"));
                }
            }
            ProfileKind::Field => {}
        }
        Ok(())
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        (self.b - self.a) / self.cells() as f64
    }

    /// Grid abscissa of node `i`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.a + (self.b - self.a) * i as f64 / self.cells() as f64
    }

    /// Piecewise-linear evaluation, clamped to the domain.
    pub fn eval(&self, x: f64) -> f64 {
        let t = ((x - self.a) / (self.b - self.a)).clamp(0.0, 1.0) * self.cells() as f64;
        let i = (t.floor() as usize).min(self.cells() - 1);
        let frac = t - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// Nodal derivative by centered differences, one-sided at the ends.
    pub fn derivative(&self) -> Vec<f64> {
        let n = self.values.len();
        let dx = self.dx();
        let mut out = vec![0.0; n];
        out[0] = (self.values[1] - self.values[0]) / dx;
        out[n - 1] = (self.values[n - 1] - self.values[n - 2]) / dx;
        for i in 1..n - 1 {
            out[i] = (self.values[i + 1] - self.values[i - 1]) / (2.0 * dx);
        }
        out
    }

    /// Trapezoid weights of the grid.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let n = self.values.len();
        let dx = self.dx();
        let mut w = vec![dx; n];
        w[0] = dx / 2.0;
        w[n - 1] = dx / 2.0;
        w
    }

    /// L1 distance to another profile on the same grid.
    pub fn l1_distance(&self, other: &ProfileGrid) -> f64 {
        let w = self.trapezoid_weights();
        self.values
            .iter()
            .zip(other.values.iter())
            .zip(w.iter())
            .map(|((&a, &b), &wi)| wi * (a - b).abs())
            .sum()
    }
}

/// The typical (steady-state) density profile `2s (rho_l + (rho_r-rho_l) x)`.
pub fn typical_density(s: f64, rho_l: f64, rho_r: f64, cells: usize) -> ProfileGrid {
    ProfileGrid::from_fn(0.0, 1.0, cells, ProfileKind::Density, |x| {
        2.0 * s * (rho_l + (rho_r - rho_l) * x)
    })
    .expect("typical profile is valid")
}
