use super::{header, linspace, require};
use crate::config::{CreditConfig, RunSettings};
use crate::error::CliError;
use crate::output::Output;
use conic::credit::{azema_paths, conditional_survival, q_cdf, simulate_surface, surface_density, SurvivalCurve, SurvivalSurfaceParams};
use conic::numerics::{gauss_hermite, norm_cdf, norm_inv_cdf};
use conic::sde_engine::{RngSpec, TimeGrid};

const CURVE_POINTS: usize = 100;

fn curve(cfg: &CreditConfig) -> Result<SurvivalCurve, CliError> {
    match &cfg.curve_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Param(format!("cannot read {}: {e}", path.display())))?;
            Ok(SurvivalCurve::parse_csv(&text)?)
        }
        None => Ok(SurvivalCurve::new(cfg.curve.clone())?),
    }
}

/// `P{S_t(T) ∈ [a, b]}` from the Gaussian law of `Φ⁻¹(S_t(T))`.
fn analytic_bin_mass(p: &SurvivalSurfaceParams, t: f64, maturity: f64, a: f64, b: f64) -> Result<f64, CliError> {
    let (m, sd) = (p.m(t, maturity), p.v(t).sqrt());
    let cdf = |s: f64| -> Result<f64, CliError> {
        Ok(match s {
            s if s <= 0.0 => 0.0,
            s if s >= 1.0 => 1.0,
            s => norm_cdf((norm_inv_cdf(s)? - m) / sd),
        })
    };
    Ok(cdf(b)? - cdf(a)?)
}

pub fn run(cfg: &CreditConfig, run: &RunSettings, out: &mut Output) -> Result<(), CliError> {
    let curve = curve(cfg)?;
    let n_paths = run.paths.unwrap_or(cfg.paths);
    let steps = run.steps.unwrap_or(cfg.steps);
    require(cfg.t > 0.0 && cfg.maturity >= cfg.t && cfg.max_maturity > cfg.t, || "credit needs maturity >= t > 0 and max_maturity > t".into())?;
    require(cfg.bins > 0 && n_paths > 0, || "credit needs bins > 0 and paths > 0".into())?;
    let rng = RngSpec::new(run.seed);
    let rule = gauss_hermite(cfg.quadrature_nodes)?;

    for &eta in &cfg.eta {
        let p = SurvivalSurfaceParams::new(curve.clone(), eta)?;

        let grid = TimeGrid::uniform(cfg.t, steps)?;
        let terminal = simulate_surface(&p, &[cfg.maturity], &grid, n_paths, rng)?[0].terminal();
        let mut counts = vec![0usize; cfg.bins];
        for &s in &terminal {
            counts[((s * cfg.bins as f64) as usize).min(cfg.bins - 1)] += 1;
        }
        let width = 1.0 / cfg.bins as f64;
        let mut rows = Vec::with_capacity(cfg.bins);
        for (i, &c) in counts.iter().enumerate() {
            let (a, b) = (i as f64 * width, (i + 1) as f64 * width);
            let mass_mc = c as f64 / n_paths as f64;
            let mass = analytic_bin_mass(&p, cfg.t, cfg.maturity, a, b)?;
            let mid = 0.5 * (a + b);
            rows.push(vec![a, b, mid, mass_mc, mass, mass_mc / width, surface_density(&p, cfg.t, cfg.maturity, mid)]);
        }
        out.table(
            &format!("credit_density_eta_{eta}"),
            &header(&["s_lo", "s_hi", "s_mid", "mass_mc", "mass_analytic", "density_mc", "density_analytic"]),
            &rows,
        )?;

        let mut cols = vec!["T".to_string(), "S0_T".into(), "S0_ratio".into()];
        cols.extend((1..=rule.order()).map(|i| format!("q_z{i}")));
        cols.push("expected".into());
        let rows = linspace(cfg.t, cfg.max_maturity, CURVE_POINTS)
            .into_iter()
            .map(|mat| {
                let mut row = vec![mat, p.curve.survival(mat), p.curve.survival(mat) / p.curve.survival(cfg.t)];
                let mut expected = 0.0;
                for (z, w) in rule.iter() {
                    let q = conditional_survival(&p, cfg.t, mat, z)?;
                    expected += w * q;
                    row.push(q);
                }
                row.push(expected);
                Ok(row)
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        out.table(&format!("credit_conditional_eta_{eta}"), &cols, &rows)?;

        let rows = (1..100)
            .map(|k| {
                let x = k as f64 / 100.0;
                Ok(vec![x, q_cdf(&p, cfg.t, cfg.maturity, x)?])
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        out.table(&format!("credit_qcdf_eta_{eta}"), &header(&["x", "cdf"]), &rows)?;
    }

    let azema = SurvivalSurfaceParams::new(SurvivalCurve::flat(cfg.azema_hazard)?, cfg.azema_eta)?;
    let grid = TimeGrid::uniform(cfg.azema_horizon, cfg.azema_steps)?;
    let (exact, euler) = azema_paths(&azema, &grid, cfg.azema_paths, rng.with_stream(2))?;
    out.paths("credit_azema_exact", &exact)?;
    out.paths("credit_azema_euler", &euler)
}
