use super::{linspace, require};
use crate::config::{QuantilesConfig, RunSettings};
use crate::error::CliError;
use crate::output::Output;
use conic::phi_martingale::{write_exp_quantile_fan, write_phi_quantile_fan, PhiMartingaleParams};

/// Φ-martingale fans per `y0` (with the `(1 − y0)`-quantile in `p_star`) and
/// the exponential-martingale fan, on `steps + 1` times from 0 to the horizon.
pub fn run(cfg: &QuantilesConfig, run: &RunSettings, out: &mut Output) -> Result<(), CliError> {
    let steps = run.steps.unwrap_or(cfg.steps);
    require(steps > 0 && cfg.horizon > 0.0 && cfg.horizon.is_finite(), || "quantiles need steps > 0 and a positive horizon".into())?;
    let times = linspace(0.0, cfg.horizon, steps);
    for &y0 in &cfg.y0 {
        let p = PhiMartingaleParams::new(y0, cfg.eta)?;
        let mut buf = Vec::new();
        write_phi_quantile_fan(&p, &times, &mut buf)?;
        out.csv_document(&format!("quantiles_phi_y0_{y0}"), &buf)?;
    }
    require(cfg.m0 > 0.0, || format!("m0 must be positive, got {}", cfg.m0))?;
    let mut buf = Vec::new();
    write_exp_quantile_fan(cfg.m0, cfg.eta, &times, &mut buf)?;
    out.csv_document("quantiles_exp", &buf)
}
