use super::require;
use crate::config::{MappingKind, RunSettings, SimulateConfig, SimulateMode};
use crate::error::CliError;
use crate::output::Output;
use conic::conic_core::{doleans_phi, simulate_conic, Mapping};
use conic::numerics::{norm_cdf, norm_inv_cdf};
use conic::sde_engine::{simulate_gaussian_diffusion, GaussianDiffusionParams, PathSet, RngSpec, TimeGrid};

fn mapping(cfg: &SimulateConfig) -> Result<Mapping, CliError> {
    Ok(match cfg.mapping {
        MappingKind::Phi => Mapping::phi(),
        MappingKind::Logistic => Mapping::logistic(cfg.c)?,
        MappingKind::Tanh => Mapping::tanh_half(),
        MappingKind::Exp => Mapping::exp_neg(cfg.lambda)?,
    })
}

/// One path file per `(y0, η)` pair; all pairs share the same normals.
pub fn run(cfg: &SimulateConfig, run: &RunSettings, out: &mut Output) -> Result<(), CliError> {
    let n_paths = run.paths.unwrap_or(cfg.paths);
    let grid = TimeGrid::uniform(cfg.horizon, run.steps.unwrap_or(cfg.steps))?;
    let rng = RngSpec::new(run.seed);
    require(!cfg.y0.is_empty() && !cfg.eta.is_empty(), || "simulate needs at least one y0 and one eta".into())?;
    require(cfg.eta.iter().all(|&e| e >= 0.0 && e.is_finite()), || "eta must be finite and >= 0".into())?;
    if cfg.mode != SimulateMode::Conic {
        require(cfg.mapping == MappingKind::Phi, || "exact and doleans modes use the Phi mapping".into())?;
    }
    let m = mapping(cfg)?;
    for &y0 in &cfg.y0 {
        for &eta in &cfg.eta {
            let set = match cfg.mode {
                SimulateMode::Conic => simulate_conic(&m, |_| eta, y0, &grid, n_paths, rng)?,
                SimulateMode::Exact => {
                    let x0 = norm_inv_cdf(y0)?;
                    let latent = simulate_gaussian_diffusion(&GaussianDiffusionParams::vasicek(x0, eta), &grid, n_paths, rng)?;
                    let rows = latent.paths().map(|p| p.iter().map(|&x| norm_cdf(x)).collect()).collect();
                    PathSet::from_rows(grid.clone(), rows, rng.seed, "phi exact")?
                }
                SimulateMode::Doleans => doleans_phi(|_| eta, norm_inv_cdf(y0)?, &grid, n_paths, rng)?,
            };
            out.paths(&format!("simulate_y0_{y0}_eta_{eta}"), &set)?;
        }
    }
    Ok(())
}
