//! `harmonic ldf`: density large-deviation rate function at a profile,
//! with the minimizing potential and an optional Legendre-transform gap.

use anyhow::ensure;
use serde::Serialize;

use harmonic_core::macroscale::{
    legendre_transform_pressure, rate_function, typical_density, ProfileGrid, ProfileKind,
    VariationalOptions,
};
use harmonic_core::ModelParams;

use crate::config::RunConfig;
use crate::output::OutputSink;

#[derive(Serialize)]
struct LdfSummary {
    params: ModelParams,
    rate_value: f64,
    grad_norm: f64,
    converged: bool,
    local_values: Vec<f64>,
    legendre_transform: Option<f64>,
    legendre_gap: Option<f64>,
}

pub fn run_command(cfg: &RunConfig, params: &ModelParams, sink: &OutputSink) -> anyhow::Result<()> {
    let (s, rho_l, rho_r) = (params.s(), params.rho_left(), params.rho_right());
    let block = &cfg.ldf;
    let opts = VariationalOptions {
        cells: block.optimizer.cells,
        starts: block.optimizer.starts,
        seed: block.optimizer.seed,
        max_iter: block.optimizer.max_iter,
        gtol: block.optimizer.gtol,
    };

    let rho_grid: ProfileGrid = match (&block.rho_profile, block.rho_const) {
        (Some(values), _) => {
            ensure!(
                values.len() == opts.cells + 1,
                "rho_profile must have cells+1 = {} nodes",
                opts.cells + 1
            );
            ProfileGrid::new(0.0, 1.0, values.clone(), ProfileKind::Density)?
        }
        (None, Some(level)) => {
            ProfileGrid::from_fn(0.0, 1.0, opts.cells, ProfileKind::Density, |_| level)?
        }
        (None, None) => typical_density(s, rho_l, rho_r, opts.cells),
    };

    let sol = rate_function(s, rho_l, rho_r, |x| rho_grid.eval(x), &opts)?;

    let mut rows = Vec::new();
    for (i, &t) in sol.theta.values.iter().enumerate() {
        let x = i as f64 / opts.cells as f64;
        rows.push(vec![
            OutputSink::fmt(x),
            OutputSink::fmt(rho_grid.eval(x)),
            OutputSink::fmt(t),
        ]);
    }
    sink.write_table(cfg.format, "ldf_profile", &["x", "rho", "theta_min"], rows)?;

    let (legendre_transform, legendre_gap) = if block.legendre {
        let lp = legendre_transform_pressure(
            s,
            rho_l,
            rho_r,
            &rho_grid,
            &VariationalOptions {
                starts: 1,
                ..opts
            },
            block.legendre_outer_iterations,
        )?;
        (Some(lp), Some(sol.value - lp))
    } else {
        (None, None)
    };

    sink.write_json(
        "summary.json",
        &LdfSummary {
            params: *params,
            rate_value: sol.value,
            grad_norm: sol.grad_norm,
            converged: sol.converged,
            local_values: sol.local_values,
            legendre_transform,
            legendre_gap,
        },
    )?;
    Ok(())
}
