//! Run configuration: JSON file plus command-line overrides, resolved and
//! hashed so every output can be traced back to its exact inputs.

use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use harmonic_core::ModelParams;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub s: f64,
    pub n_sites: usize,
    pub rho_left: f64,
    pub rho_right: f64,
}

impl Default for ModelBlock {
    fn default() -> Self {
        ModelBlock {
            s: 0.5,
            n_sites: 3,
            rho_left: 0.2,
            rho_right: 0.8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateBlock {
    #[serde(default = "default_events")]
    pub events: Option<u64>,
    #[serde(default)]
    pub time: Option<f64>,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_burn_in")]
    pub burn_in: f64,
}

fn default_events() -> Option<u64> {
    Some(100_000)
}
fn default_replicas() -> usize {
    4
}
fn default_seed() -> u64 {
    42
}
fn default_burn_in() -> f64 {
    0.2
}

impl Default for SimulateBlock {
    fn default() -> Self {
        SimulateBlock {
            events: default_events(),
            time: None,
            replicas: default_replicas(),
            seed: default_seed(),
            burn_in: default_burn_in(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NessBlock {
    /// per-site moment cutoff of the reconstruction table
    #[serde(default = "default_xi_cap")]
    pub xi_cap: u64,
    /// emit moments G(xi) for |xi| up to this order
    #[serde(default = "default_moment_order")]
    pub moment_order: u64,
    #[serde(default = "default_marginal_cap")]
    pub marginal_cap: u64,
    #[serde(default = "default_nodes")]
    pub quad_nodes: usize,
    /// states eta at which to report mu(eta); empty = small-state grid
    #[serde(default)]
    pub states: Vec<Vec<u64>>,
}

fn default_xi_cap() -> u64 {
    50
}
fn default_moment_order() -> u64 {
    4
}
fn default_marginal_cap() -> u64 {
    30
}
fn default_nodes() -> usize {
    32
}

impl Default for NessBlock {
    fn default() -> Self {
        NessBlock {
            xi_cap: default_xi_cap(),
            moment_order: default_moment_order(),
            marginal_cap: default_marginal_cap(),
            quad_nodes: default_nodes(),
            states: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MgfMethodTag {
    Sum,
    Integral,
    Recurrence,
    Finite,
    Mixture,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MgfBlock {
    #[serde(default = "default_mgf_method")]
    pub method: MgfMethodTag,
    /// constant-field grid of h values for Psi (sum/integral/mixture)
    #[serde(default = "default_h_grid")]
    pub h_grid: Vec<f64>,
    /// c grid for the constant-field reduced function (recurrence/finite)
    #[serde(default = "default_c_grid")]
    pub c_grid: Vec<f64>,
    #[serde(default = "default_sum_cap")]
    pub sum_cap: u64,
    #[serde(default = "default_nodes")]
    pub quad_nodes: usize,
    #[serde(default = "default_cheb_degree")]
    pub cheb_degree: usize,
}

fn default_mgf_method() -> MgfMethodTag {
    MgfMethodTag::Integral
}
fn default_h_grid() -> Vec<f64> {
    vec![-0.8, -0.4, -0.2, 0.0, 0.2, 0.4]
}
fn default_c_grid() -> Vec<f64> {
    vec![0.1, 0.3, 0.5, 0.7, 0.9]
}
fn default_sum_cap() -> u64 {
    250
}
fn default_cheb_degree() -> usize {
    64
}

impl Default for MgfBlock {
    fn default() -> Self {
        MgfBlock {
            method: default_mgf_method(),
            h_grid: default_h_grid(),
            c_grid: default_c_grid(),
            sum_cap: default_sum_cap(),
            quad_nodes: default_nodes(),
            cheb_degree: default_cheb_degree(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerBlock {
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default = "default_opt_seed")]
    pub seed: u64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_gtol")]
    pub gtol: f64,
}

fn default_cells() -> usize {
    400
}
fn default_starts() -> usize {
    8
}
fn default_opt_seed() -> u64 {
    0
}
fn default_max_iter() -> usize {
    600
}
fn default_gtol() -> f64 {
    1e-11
}

impl Default for OptimizerBlock {
    fn default() -> Self {
        OptimizerBlock {
            cells: default_cells(),
            starts: default_starts(),
            seed: default_opt_seed(),
            max_iter: default_max_iter(),
            gtol: default_gtol(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PressureBlock {
    /// constant field for the closed-form comparison and profile output
    #[serde(default = "default_h_const")]
    pub h_const: f64,
    /// grid of constant fields for the (h, P) table
    #[serde(default = "default_h_grid")]
    pub h_table: Vec<f64>,
    /// system sizes for the finite-volume trend
    #[serde(default = "default_trend_sizes")]
    pub trend_sizes: Vec<usize>,
    #[serde(default)]
    pub optimizer: OptimizerBlock,
}

fn default_h_const() -> f64 {
    -0.5
}
fn default_trend_sizes() -> Vec<usize> {
    vec![2, 4, 8, 16, 32, 64]
}

impl Default for PressureBlock {
    fn default() -> Self {
        PressureBlock {
            h_const: default_h_const(),
            h_table: default_h_grid(),
            trend_sizes: default_trend_sizes(),
            optimizer: OptimizerBlock::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LdfBlock {
    /// density profile sampled on the optimizer grid: constant value ...
    #[serde(default)]
    pub rho_const: Option<f64>,
    /// ... or explicit node values on [0,1] (overrides rho_const)
    #[serde(default)]
    pub rho_profile: Option<Vec<f64>>,
    #[serde(default)]
    pub optimizer: OptimizerBlock,
    /// also compute the Legendre transform of the pressure at rho
    #[serde(default)]
    pub legendre: bool,
    #[serde(default = "default_outer")]
    pub legendre_outer_iterations: usize,
}

fn default_outer() -> usize {
    200
}

impl Default for LdfBlock {
    fn default() -> Self {
        LdfBlock {
            rho_const: None,
            rho_profile: None,
            optimizer: OptimizerBlock::default(),
            legendre: false,
            legendre_outer_iterations: default_outer(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdditivityKind {
    Pressure,
    Rate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdditivityBlock {
    #[serde(default = "default_additivity_kind")]
    pub kind: AdditivityKind,
    #[serde(default = "default_splits")]
    pub splits: Vec<f64>,
    /// constant field (pressure) or constant density (rate)
    #[serde(default = "default_additivity_level")]
    pub level: f64,
    #[serde(default)]
    pub optimizer: OptimizerBlock,
}

fn default_additivity_kind() -> AdditivityKind {
    AdditivityKind::Pressure
}
fn default_splits() -> Vec<f64> {
    vec![0.5]
}
fn default_additivity_level() -> f64 {
    0.4
}

impl Default for AdditivityBlock {
    fn default() -> Self {
        AdditivityBlock {
            kind: default_additivity_kind(),
            splits: default_splits(),
            level: default_additivity_level(),
            optimizer: OptimizerBlock {
                cells: 200,
                starts: 2,
                ..Default::default()
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Full run configuration as stored on disk.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelBlock,
    #[serde(default)]
    pub simulate: SimulateBlock,
    #[serde(default)]
    pub ness: NessBlock,
    #[serde(default)]
    pub mgf: MgfBlock,
    #[serde(default)]
    pub pressure: PressureBlock,
    #[serde(default)]
    pub ldf: LdfBlock,
    #[serde(default)]
    pub additivity: AdditivityBlock,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
}

fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("config {} does not match the schema", path.display()))?;
        Ok(cfg)
    }

    /// Apply command-line overrides and validate the model parameters.
    pub fn resolve(
        mut self,
        seed: Option<u64>,
        format: Option<OutputFormat>,
        allow_reflect: bool,
    ) -> anyhow::Result<(Self, ModelParams)> {
        if let Some(s) = seed {
            self.simulate.seed = s;
        }
        if let Some(f) = format {
            self.format = f;
        }
        let m = &self.model;
        let params = if allow_reflect {
            ModelParams::new_reflecting(m.s, m.n_sites, m.rho_left, m.rho_right)?
        } else if m.rho_left > m.rho_right {
            bail!(
                "rho_left = {} > rho_right = {}; pass --allow-reflect to normalize by lattice reflection",
                m.rho_left,
                m.rho_right
            );
        } else {
            ModelParams::new(m.s, m.n_sites, m.rho_left, m.rho_right)?
        };
        Ok((self, params))
    }

    /// Canonical serialized form and its SHA-256 hash.
    pub fn canonical_json(&self) -> anyhow::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn hash(&self) -> anyhow::Result<String> {
        let bytes = self.canonical_json()?;
        let digest = Sha256::digest(bytes.as_bytes());
        Ok(format!("{digest:x}"))
    }
}
