//! `harmonic mgf`: moment-generating-function tables. The Psi family
//! (sum / integral / mixture) tabulates constant fields from `h_grid`;
//! the reduced constant-field family (recurrence / finite) tabulates
//! `c_grid`.

use harmonic_core::mgf::{
    c_map, mgf, phi_constant_recurrence, phi_finite_sum, FieldVector, IntegralVariant, MgfMethod,
};
use harmonic_core::ModelParams;

use crate::config::{MgfMethodTag, RunConfig};
use crate::output::OutputSink;

pub fn run_command(cfg: &RunConfig, params: &ModelParams, sink: &OutputSink) -> anyhow::Result<()> {
    let block = &cfg.mgf;
    match block.method {
        MgfMethodTag::Sum | MgfMethodTag::Integral | MgfMethodTag::Mixture => {
            let mut rows = Vec::new();
            for &h in &block.h_grid {
                let hv = vec![h; params.n_sites()];
                let field = FieldVector::new(params, hv.clone())?;
                let c = c_map(params, &hv)?[0];
                let psi_integral = mgf(
                    params,
                    &field,
                    MgfMethod::Integral {
                        nodes: block.quad_nodes,
                        variant: IntegralVariant::Nested,
                    },
                )?;
                let psi_mixture = mgf(
                    params,
                    &field,
                    MgfMethod::Mixture {
                        nodes: block.quad_nodes,
                    },
                )?;
                let psi_sum = if c.abs() < 1.0 {
                    OutputSink::fmt(mgf(params, &field, MgfMethod::Sum { cap: block.sum_cap })?)
                } else {
                    "outside-domain".to_string()
                };
                rows.push(vec![
                    OutputSink::fmt(h),
                    OutputSink::fmt(c),
                    psi_sum,
                    OutputSink::fmt(psi_integral),
                    OutputSink::fmt(psi_mixture),
                ]);
            }
            sink.write_table(
                cfg.format,
                "mgf_psi",
                &["h", "c", "psi_sum", "psi_integral", "psi_mixture"],
                rows,
            )?;
        }
        MgfMethodTag::Recurrence | MgfMethodTag::Finite => {
            let integer_two_s = (2.0 * params.s() - (2.0 * params.s()).round()).abs() < 1e-9;
            let mut rows = Vec::new();
            for &c in &block.c_grid {
                let (rec, rec_err) =
                    phi_constant_recurrence(params.s(), params.n_sites(), c, block.cheb_degree, 80)?;
                let (fin, cond) = if integer_two_s && c > 0.0 && c < 1.0 {
                    let eval = phi_finite_sum(params.s(), params.n_sites(), c)?;
                    (OutputSink::fmt(eval.value), OutputSink::fmt(eval.raw_condition))
                } else {
                    ("unavailable".to_string(), "unavailable".to_string())
                };
                rows.push(vec![
                    OutputSink::fmt(c),
                    OutputSink::fmt(rec),
                    OutputSink::fmt(rec_err),
                    fin,
                    cond,
                ]);
            }
            sink.write_table(
                cfg.format,
                "mgf_phi",
                &[
                    "c",
                    "phi_recurrence",
                    "recurrence_error_estimate",
                    "phi_finite_sum",
                    "finite_sum_raw_condition",
                ],
                rows,
            )?;
        }
    }
    Ok(())
}
