use crate::config::{CollapseConfig, RunSettings};
use crate::error::CliError;
use crate::output::Output;
use conic::conic_core::{simulate_conic_summaries, Mapping};
use conic::phi_martingale::{phi_cdf, PhiMartingaleParams};
use conic::sde_engine::{fmt17, RngSpec, TimeGrid};

/// Terminal mass near each boundary and inside the dip interval
/// `[F(X₀ − μ), F(X₀ + μ)]`, `X₀ = F⁻¹(y0)`, for the Φ mapping and for the
/// bimodal mixture centred at 0.
pub fn run(cfg: &CollapseConfig, run: &RunSettings, out: &mut Output) -> Result<(), CliError> {
    let n_paths = run.paths.unwrap_or(cfg.paths);
    let grid = TimeGrid::uniform(cfg.horizon, run.steps.unwrap_or(cfg.steps))?;
    let rng = RngSpec::new(run.seed);
    let eps = cfg.eps;
    if !(eps > 0.0 && eps < 0.5) {
        return Err(CliError::Param(format!("eps must lie in (0, 0.5), got {eps}")));
    }
    let phi = PhiMartingaleParams::new(cfg.y0, cfg.eta)?;
    let analytic_interior = phi_cdf(&phi, cfg.horizon, 1.0 - eps) - phi_cdf(&phi, cfg.horizon, eps);
    let mappings = [
        ("phi", Mapping::phi(), analytic_interior),
        ("bimodal", Mapping::bimodal(0.0, cfg.bimodal_mu, cfg.bimodal_s)?, f64::NAN),
    ];
    let mut rows = Vec::new();
    for (name, m, analytic) in mappings {
        let ends: Vec<f64> = simulate_conic_summaries(&m, |_| cfg.eta, cfg.y0, &grid, n_paths, rng)?.iter().map(|s| s.terminal).collect();
        let x0 = m.inverse(cfg.y0)?;
        let (dip_lo, dip_hi) = (m.value(x0 - cfg.bimodal_mu), m.value(x0 + cfg.bimodal_mu));
        let frac = |pred: &dyn Fn(f64) -> bool| ends.iter().filter(|&&y| pred(y)).count() as f64 / n_paths as f64;
        let low = frac(&|y| y < eps);
        let high = frac(&|y| y > 1.0 - eps);
        let dip = frac(&|y| y >= dip_lo && y <= dip_hi);
        rows.push(
            std::iter::once(name.to_string())
                .chain([low, high, 1.0 - low - high, dip_lo, dip_hi, dip, analytic].map(fmt17))
                .collect(),
        );
    }
    out.records(
        "collapse",
        &["mapping", "mass_low", "mass_high", "mass_interior", "dip_lo", "dip_hi", "dip_mass", "analytic_interior"],
        &rows,
    )
}
