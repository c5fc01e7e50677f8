//! `harmonic pressure`: optimal profile, pressure table and the
//! finite-volume trend for constant fields.

use serde::Serialize;

use harmonic_core::macroscale::{
    finite_pressure_trend, pressure_constant_closed_form, pressure_variational, theta_star,
    VariationalOptions,
};
use harmonic_core::macroscale::pressure::euler_lagrange_residual;
use harmonic_core::ModelParams;

use crate::config::RunConfig;
use crate::output::OutputSink;

#[derive(Serialize)]
struct PressureSummary {
    params: ModelParams,
    h_const: f64,
    variational_value: f64,
    closed_form_value: f64,
    gap: f64,
    euler_lagrange_residual: f64,
    grad_norm: f64,
    converged: bool,
    local_values: Vec<f64>,
}

fn options(cfg: &RunConfig) -> VariationalOptions {
    let o = &cfg.pressure.optimizer;
    VariationalOptions {
        cells: o.cells,
        starts: o.starts,
        seed: o.seed,
        max_iter: o.max_iter,
        gtol: o.gtol,
    }
}

pub fn run_command(cfg: &RunConfig, params: &ModelParams, sink: &OutputSink) -> anyhow::Result<()> {
    let (s, rho_l, rho_r) = (params.s(), params.rho_left(), params.rho_right());
    let block = &cfg.pressure;
    let opts = options(cfg);
    let h = block.h_const;

    let sol = pressure_variational(s, rho_l, rho_r, |_| h, &opts)?;
    let closed = pressure_constant_closed_form(s, rho_l, rho_r, 0.0, 1.0, h)?;

    let mut rows = Vec::new();
    for (i, &t) in sol.theta.values.iter().enumerate() {
        let x = i as f64 / opts.cells as f64;
        rows.push(vec![
            OutputSink::fmt(x),
            OutputSink::fmt(t),
            OutputSink::fmt(theta_star(rho_l, rho_r, h, x)?),
        ]);
    }
    sink.write_table(
        cfg.format,
        "pressure_profile",
        &["x", "theta_optimal", "theta_star"],
        rows,
    )?;

    let mut rows = Vec::new();
    for &hv in &block.h_table {
        let cf = pressure_constant_closed_form(s, rho_l, rho_r, 0.0, 1.0, hv);
        let var = pressure_variational(s, rho_l, rho_r, |_| hv, &opts);
        match (cf, var) {
            (Ok(cf), Ok(var)) => rows.push(vec![
                OutputSink::fmt(hv),
                OutputSink::fmt(cf),
                OutputSink::fmt(var.value),
                OutputSink::fmt((cf - var.value).abs()),
            ]),
            _ => rows.push(vec![
                OutputSink::fmt(hv),
                "outside-domain".into(),
                "outside-domain".into(),
                "outside-domain".into(),
            ]),
        }
    }
    sink.write_table(
        cfg.format,
        "pressure_table",
        &["h", "p_closed_form", "p_variational", "gap"],
        rows,
    )?;

    if !block.trend_sizes.is_empty() {
        let trend = finite_pressure_trend(s, rho_l, rho_r, h, &block.trend_sizes)?;
        let rows = trend
            .iter()
            .map(|r| {
                vec![
                    r.n_sites.to_string(),
                    OutputSink::fmt(r.finite),
                    OutputSink::fmt(r.limit),
                    OutputSink::fmt(r.gap),
                ]
            })
            .collect();
        sink.write_table(
            cfg.format,
            "pressure_trend",
            &["n_sites", "finite_pressure", "limit", "gap"],
            rows,
        )?;
    }

    sink.write_json(
        "summary.json",
        &PressureSummary {
            params: *params,
            h_const: h,
            variational_value: sol.value,
            closed_form_value: closed,
            gap: (sol.value - closed).abs(),
            euler_lagrange_residual: euler_lagrange_residual(h, &sol.theta),
            grad_norm: sol.grad_norm,
            converged: sol.converged,
            local_values: sol.local_values,
        },
    )?;
    Ok(())
}
