//! Representations of the steady-state moment generating function.
//!
//! The MGF factorizes as a boundary-density prefactor times the reduced
//! function `Phi_N` composed with the `c`-map; `Phi_N` itself is available
//! as an N-fold sum, as ordered-simplex integrals, and — for constant
//! fields — through a Beta-kernel recurrence, a residue finite sum and a
//! Laplace-transform identity ([`constant`]).

pub mod constant;
pub mod phi;

pub use constant::{
    g_transform_check, laplace_ghat, phi_constant_recurrence, phi_finite_sum, FiniteSumEval,
    TransformCheck,
};
pub use phi::{phi_nested_integral, phi_unnested_sum, IntegralVariant};

use crate::model::negbin::negbin_mgf;
use crate::model::ModelParams;
use crate::ness::simplex::{simplex_product_expectation, SimplexMethod};
use crate::{Error, Result};

/// Symmetric admissibility bound `log(1 + 1/rho_right)`; positivity of the
/// MGF only needs the one-sided `h < bound`, which is what [`c_map`]
/// enforces.
pub fn admissible_bound(params: &ModelParams) -> f64 {
    params.rho_right().recip().ln_1p()
}

/// A site field with the one-sided domain check.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldVector(Vec<f64>);

impl FieldVector {
    pub fn new(params: &ModelParams, h: Vec<f64>) -> Result<Self> {
        if h.len() != params.n_sites() {
            return Err(Error::domain(format!(
                "field length {} != N = {}",
                h.len(),
                params.n_sites()
            )));
        }
        let bound = admissible_bound(params);
        if let Some(&bad) = h.iter().find(|&&x| x >= bound) {
            return Err(Error::domain(format!(
                "field component {bad} outside the admissible domain h < {bound}"
            )));
        }
        Ok(FieldVector(h))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    /// Whether the field also satisfies the symmetric bound `|h_i| <= log(1+1/rho_r)`.
    pub fn within_symmetric_domain(&self, params: &ModelParams) -> bool {
        let bound = admissible_bound(params);
        self.0.iter().all(|&x| x.abs() <= bound)
    }
}

/// The `c`-map: `c_i = (rho_r - rho_l)(1 - e^{h_i}) / (1 + rho_r (1 - e^{h_i}))`.
pub fn c_map(params: &ModelParams, h: &[f64]) -> Result<Vec<f64>> {
    let (rho_l, rho_r) = (params.rho_left(), params.rho_right());
    h.iter()
        .map(|&hi| {
            let u = -hi.exp_m1();
            let den = 1.0 + rho_r * u;
            if den <= 0.0 {
                return Err(Error::domain(format!(
                    "c-map undefined: 1 + rho_r (1-e^h) = {den} <= 0 at h = {hi}"
                )));
            }
            Ok((rho_r - rho_l) * u / den)
        })
        .collect()
}

/// Evaluation route for the full MGF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MgfMethod {
    /// truncated N-fold sum of the reduced function
    Sum { cap: u64 },
    /// ordered-simplex integral of the reduced function
    Integral { nodes: usize, variant: IntegralVariant },
    /// direct mixture average of Negative-Binomial MGFs
    Mixture { nodes: usize },
}

/// Steady-state MGF `Psi(h)` by the selected representation.
pub fn mgf(params: &ModelParams, h: &FieldVector, method: MgfMethod) -> Result<f64> {
    let hs = h.components();
    match method {
        MgfMethod::Sum { cap } => {
            let c = c_map(params, hs)?;
            let (phi, _) = phi_unnested_sum(&c, params.s(), cap)?;
            Ok(boundary_prefactor(params, hs)? * phi)
        }
        MgfMethod::Integral { nodes, variant } => {
            let c = c_map(params, hs)?;
            let phi = phi_nested_integral(&c, params.s(), nodes, variant)?;
            Ok(boundary_prefactor(params, hs)? * phi)
        }
        MgfMethod::Mixture { nodes } => {
            let s = params.s();
            let (rho_l, width) = (params.rho_left(), params.rho_right() - params.rho_left());
            if width == 0.0 {
                return hs
                    .iter()
                    .map(|&hi| negbin_mgf(s, rho_l, hi))
                    .product::<Result<f64>>();
            }
            simplex_product_expectation(
                s,
                params.n_sites(),
                nodes,
                SimplexMethod::TensorBeta,
                |i, u| negbin_mgf(s, rho_l + width * u, hs[i]).unwrap_or(f64::NAN),
            )
        }
    }
}

fn boundary_prefactor(params: &ModelParams, h: &[f64]) -> Result<f64> {
    let rho_r = params.rho_right();
    let two_s = params.two_s();
    let mut ln_acc = 0.0;
    for &hi in h {
        let arg = rho_r * (-hi.exp_m1());
        if arg <= -1.0 {
            return Err(Error::domain("boundary prefactor outside domain"));
        }
        ln_acc -= two_s * arg.ln_1p();
    }
    Ok(ln_acc.exp())
}
