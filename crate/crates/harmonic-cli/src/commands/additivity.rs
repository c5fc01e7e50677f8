//! `harmonic additivity`: both sides of the additivity identity for the
//! modified pressure or rate function at constant inputs.

use harmonic_core::macroscale::{
    additivity_check_pressure, additivity_check_rate, VariationalOptions,
};
use harmonic_core::ModelParams;

use crate::config::{AdditivityKind, RunConfig};
use crate::output::OutputSink;

pub fn run_command(cfg: &RunConfig, params: &ModelParams, sink: &OutputSink) -> anyhow::Result<()> {
    let block = &cfg.additivity;
    let opts = VariationalOptions {
        cells: block.optimizer.cells,
        starts: block.optimizer.starts,
        seed: block.optimizer.seed,
        max_iter: block.optimizer.max_iter,
        gtol: block.optimizer.gtol,
    };
    let (s, rho_l, rho_r) = (params.s(), params.rho_left(), params.rho_right());
    let level = block.level;
    let report = match block.kind {
        AdditivityKind::Pressure => {
            additivity_check_pressure(s, rho_l, rho_r, &move |_| level, &block.splits, &opts)?
        }
        AdditivityKind::Rate => {
            additivity_check_rate(s, rho_l, rho_r, &move |_| level, &block.splits, &opts)?
        }
    };
    sink.write_json("additivity.json", &report)?;
    Ok(())
}
