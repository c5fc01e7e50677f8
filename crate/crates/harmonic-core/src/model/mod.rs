//! Model parameters, configurations, jump rates, elementary distributions
//! and the truncated Markov generator.

pub mod generator;
pub mod negbin;
pub mod rates;

pub use generator::{
    build_truncated_generator, equilibrium_product_measure, product_negbin_measure,
    TruncatedGenerator, TruncatedProduct,
};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Whether reservoir densities were given in the canonical order
/// `rho_left <= rho_right` or had to be reflected (`i -> N+1-i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Identity,
    Reflected,
}

/// Parameters of the open harmonic process: spin `s > 0`, system size `N`,
/// reservoir densities `0 <= rho_left <= rho_right`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    s: f64,
    n_sites: usize,
    rho_left: f64,
    rho_right: f64,
    orientation: Orientation,
}

impl ModelParams {
    /// Canonical constructor; rejects `rho_left > rho_right`.
    pub fn new(s: f64, n_sites: usize, rho_left: f64, rho_right: f64) -> Result<Self> {
        if rho_left > rho_right {
            return Err(Error::params(format!(
                "rho_left={rho_left} > rho_right={rho_right}; reflect the lattice or use new_reflecting"
            )));
        }
        Self::validate(s, n_sites, rho_left, rho_right)?;
        Ok(ModelParams {
            s,
            n_sites,
            rho_left,
            rho_right,
            orientation: Orientation::Identity,
        })
    }

    /// Constructor that normalizes `rho_left > rho_right` by the lattice
    /// reflection `i -> N+1-i`, recording the orientation.
    pub fn new_reflecting(s: f64, n_sites: usize, rho_left: f64, rho_right: f64) -> Result<Self> {
        if rho_left > rho_right {
            Self::validate(s, n_sites, rho_right, rho_left)?;
            Ok(ModelParams {
                s,
                n_sites,
                rho_left: rho_right,
                rho_right: rho_left,
                orientation: Orientation::Reflected,
            })
        } else {
            Self::new(s, n_sites, rho_left, rho_right)
        }
    }

    fn validate(s: f64, n_sites: usize, rho_left: f64, rho_right: f64) -> Result<()> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::params(format!("spin s must be positive, got {s}")));
        }
        if n_sites == 0 {
            return Err(Error::params("system size N must be >= 1"));
        }
        if !(rho_left >= 0.0) || !rho_right.is_finite() {
            return Err(Error::params(format!(
                "reservoir densities must satisfy 0 <= rho_left <= rho_right < inf, got ({rho_left}, {rho_right})"
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn s(&self) -> f64 {
        self.s
    }

    #[inline]
    pub fn two_s(&self) -> f64 {
        2.0 * self.s
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    #[inline]
    pub fn rho_left(&self) -> f64 {
        self.rho_left
    }

    #[inline]
    pub fn rho_right(&self) -> f64 {
        self.rho_right
    }

    #[inline]
    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Size of the uniform sample whose order statistics (read off every
    /// `2s` positions) mix the steady state: `2s(N+1) - 1`.
    #[inline]
    pub fn order_statistics_count(&self) -> f64 {
        self.two_s() * (self.n_sites as f64 + 1.0) - 1.0
    }

    #[inline]
    pub fn is_equilibrium(&self) -> bool {
        self.rho_left == self.rho_right
    }

    /// True when `2s` is an integer (within floating tolerance), in which
    /// case the mixing law is plain uniform order statistics.
    pub fn two_s_is_integer(&self) -> bool {
        let t = self.two_s();
        (t - t.round()).abs() < 1e-12 && t.round() >= 1.0
    }
}

/// A particle configuration: occupation numbers per site.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    occupations: Vec<u64>,
}

impl Configuration {
    pub fn new(occupations: Vec<u64>) -> Self {
        Configuration { occupations }
    }

    pub fn empty(n_sites: usize) -> Self {
        Configuration {
            occupations: vec![0; n_sites],
        }
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.occupations.len()
    }

    #[inline]
    pub fn occupations(&self) -> &[u64] {
        &self.occupations
    }

    #[inline]
    pub fn get(&self, site: usize) -> u64 {
        self.occupations[site]
    }

    #[inline]
    pub fn set(&mut self, site: usize, value: u64) {
        self.occupations[site] = value;
    }

    /// Total particle number.
    #[inline]
    pub fn total(&self) -> u64 {
        self.occupations.iter().sum()
    }

    /// Partial tail sum of occupations from `site` (0-based) onward.
    #[inline]
    pub fn tail_sum(&self, site: usize) -> u64 {
        self.occupations[site..].iter().sum()
    }
}

impl From<Vec<u64>> for Configuration {
    fn from(v: Vec<u64>) -> Self {
        Configuration::new(v)
    }
}
