use super::{header, require};
use crate::config::{BivariateConfig, RunSettings};
use crate::error::CliError;
use crate::output::Output;
use conic::credit::{bivariate_surface, BivariateParams, Maturities, SurvivalCurve};
use conic::sde_engine::{PathSet, RngSpec, TimeGrid};

fn head(set: &PathSet, n: usize) -> Result<PathSet, CliError> {
    let rows = set.paths().take(n).map(<[f64]>::to_vec).collect();
    Ok(PathSet::from_rows(set.grid().clone(), rows, set.seed(), set.label())?)
}

/// Per `ρ`: shown paths of `G_t(t, t)` and `G_t(T, T)`, and a summary of
/// all paths against `G₀` and the independent product `S¹₀ S²₀`. Every `ρ`
/// reuses the same Brownian pairs.
pub fn run(cfg: &BivariateConfig, run: &RunSettings, out: &mut Output) -> Result<(), CliError> {
    require(cfg.dt > 0.0 && cfg.horizon > 0.0, || "bivariate needs dt > 0 and horizon > 0".into())?;
    let steps = run.steps.unwrap_or_else(|| (cfg.horizon / cfg.dt).round().max(1.0) as usize);
    let n_paths = run.paths.unwrap_or(cfg.paths);
    require(n_paths >= 2, || "bivariate needs at least two paths".into())?;
    let grid = TimeGrid::uniform(cfg.horizon, steps)?;
    let rng = RngSpec::new(run.seed);
    let (c1, c2) = (SurvivalCurve::flat(cfg.h1)?, SurvivalCurve::flat(cfg.h2)?);
    for &rho in &cfg.rho {
        let b = BivariateParams::new(c1.clone(), c2.clone(), cfg.eta1, cfg.eta2, rho)?;
        let running = bivariate_surface(&b, Maturities::Running, &grid, n_paths, rng)?;
        let fixed = bivariate_surface(&b, Maturities::Fixed(cfg.maturity, cfg.maturity), &grid, n_paths, rng)?;
        out.paths(&format!("bivariate_running_rho_{rho}"), &head(&running, cfg.shown_paths)?)?;
        out.paths(&format!("bivariate_fixed_rho_{rho}"), &head(&fixed, cfg.shown_paths)?)?;

        let g0_fixed = b.initial_joint_survival(cfg.maturity, cfg.maturity);
        let rows: Vec<Vec<f64>> = grid
            .times()
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                let mut row = vec![t];
                for set in [&running, &fixed] {
                    let col = set.column(k);
                    let m = set.mean_at(k);
                    row.extend([m.mean, m.std_error, col.iter().copied().fold(f64::INFINITY, f64::min), col.iter().copied().fold(f64::NEG_INFINITY, f64::max)]);
                }
                row.extend([b.initial_joint_survival(t, t), g0_fixed, c1.survival(t) * c2.survival(t)]);
                row
            })
            .collect();
        out.table(
            &format!("bivariate_summary_rho_{rho}"),
            &header(&[
                "t",
                "running_mean",
                "running_se",
                "running_min",
                "running_max",
                "fixed_mean",
                "fixed_se",
                "fixed_min",
                "fixed_max",
                "running_g0",
                "fixed_g0",
                "product",
            ]),
            &rows,
        )?;
    }
    Ok(())
}
