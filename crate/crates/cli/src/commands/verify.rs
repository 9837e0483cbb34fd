use crate::config::{RunSettings, VerifyConfig};
use crate::error::CliError;
use crate::output::Output;
use conic::conic_core::{doleans_phi, simulate_conic, verify_driftless, Mapping};
use conic::credit::{copula_correlation, expected_conditional_survival, simulate_bivariate, BivariateParams, Maturities, SurvivalCurve, SurvivalSurfaceParams};
use conic::numerics::{gauss_hermite, norm_cdf};
use conic::phi_martingale::PhiMartingaleParams;
use conic::sde_engine::{euler_driftless, fmt17, sample_vasicek_exact, RngSpec, TimeGrid};
use conic::stats::{ks_critical_two_sample, ks_two_sample, MeanEstimate};
use conic::verhulst_yor::{density_bin_masses, mc_verhulst_oracle, DensityOptions, VerhulstParams};

const DRIFT_KILL_PATHS: usize = 100_000;

/// One line of the report. `pass` is `measured <= tolerance` unless the
/// check says otherwise.
struct Check {
    name: String,
    measured: f64,
    tolerance: f64,
    pass: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { name: name.into(), measured, tolerance, pass: measured <= tolerance }
    }

    fn at_least(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { name: name.into(), measured, tolerance, pass: measured >= tolerance }
    }
}

fn martingale_checks(n: usize, seed: u64, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let phi = PhiMartingaleParams::new(0.75, 0.8)?;
    let ys: Vec<f64> = sample_vasicek_exact(phi.x0(), phi.eta, 5.0, n, RngSpec::new(seed))?.into_iter().map(norm_cdf).collect();
    checks.push(Check::at_most("martingale phi exact |z|", MeanEstimate::of(&ys).z_score(0.75), 4.0));

    let grid = TimeGrid::uniform(1.0, 200)?;
    let logistic = euler_driftless(|_, y: f64| 0.5 * y * (1.0 - y), 0.3, &grid, n, RngSpec::new(seed + 1))?;
    checks.push(Check::at_most("martingale logistic euler |z|", logistic.mean_at(grid.n_steps()).z_score(0.3), 4.0));

    let coarse = TimeGrid::uniform(5.0, 50)?;
    let dp = doleans_phi(|_| 0.4, 0.2, &coarse, n, RngSpec::new(seed + 2))?;
    checks.push(Check::at_most("martingale doleans phi |z|", dp.mean_at(coarse.n_steps()).z_score(norm_cdf(0.2)), 4.0));

    let (lo, hi) = [&logistic, &dp].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
        let (a, b) = s.range();
        (lo.min(a), hi.max(b))
    });
    let outside = ys.iter().filter(|y| !(0.0..=1.0).contains(*y)).count() + usize::from(lo < 0.0) + usize::from(hi > 1.0);
    checks.push(Check::at_most("samples outside the unit interval", outside as f64, 0.0));
    Ok(())
}

fn ks_check(n: usize, seed: u64, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let grid = TimeGrid::uniform(1.0, 500)?;
    let direct = euler_driftless(|_, y: f64| 0.5 * y * (1.0 - y), 0.5, &grid, n, RngSpec::new(seed))?;
    let mapped = simulate_conic(&Mapping::logistic(1.0)?, |_| 0.5, 0.5, &grid, n, RngSpec::new(seed + 1))?;
    let d = ks_two_sample(&direct.terminal(), &mapped.terminal());
    checks.push(Check::at_most("ks logistic direct vs mapped D", d, ks_critical_two_sample(0.001, n, n)));
    Ok(())
}

fn driftless_checks(checks: &mut Vec<Check>) -> Result<(), CliError> {
    let times: Vec<f64> = (0..=10).map(|i| 0.5 * i as f64).collect();
    let xs: Vec<f64> = (0..=80).map(|i| -4.0 + 0.1 * i as f64).collect();
    let mappings = [
        ("phi", Mapping::phi()),
        ("logistic", Mapping::logistic(2.0)?),
        ("tanh", Mapping::tanh_half()),
        ("bimodal", Mapping::bimodal(0.0, 1.5, 0.5)?),
    ];
    for (name, m) in mappings {
        checks.push(Check::at_most(format!("driftless residual {name}"), verify_driftless(&m, |t| 0.3 + t, &times, &xs), 1e-8));
    }
    Ok(())
}

fn quadrature_checks(checks: &mut Vec<Check>) -> Result<(), CliError> {
    let rule = gauss_hermite(16)?;
    let mut worst: f64 = 0.0;
    for k in (0..=30).step_by(2) {
        let exact: f64 = (1..k).step_by(2).map(|v| v as f64).product();
        worst = worst.max((rule.expect(|z| z.powi(k)) - exact).abs() / exact);
    }
    checks.push(Check::at_most("gauss-hermite 16 moment rel error", worst, 1e-9));
    let curve = SurvivalCurve::new(vec![(1.0, 0.05), (3.0, 0.06), (5.0, 0.08), (7.0, 0.085), (10.0, 0.065)])?;
    let p = SurvivalSurfaceParams::new(curve, 0.25)?;
    let mut gap: f64 = 0.0;
    for &(t, mat) in &[(0.5, 2.0), (1.0, 5.0), (3.0, 7.0), (5.0, 10.0)] {
        gap = gap.max((expected_conditional_survival(&p, t, mat, 16)? - expected_conditional_survival(&p, t, mat, 64)?).abs());
    }
    checks.push(Check::at_most("E[Q] n16 vs n64", gap, 1e-6));
    Ok(())
}

fn yor_check(cfg: &VerifyConfig, seed: u64, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let p = VerhulstParams::new(1.0, 0.3, 1.0)?;
    let t = 0.25;
    let sample = mc_verhulst_oracle(&p, t, cfg.yor_paths, 100, RngSpec::new(seed))?;
    let mut sorted = sample.survivors.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.len() < 1000 || cfg.yor_bins == 0 {
        return Err(CliError::Param("the density check needs at least 1000 surviving paths and one bin".into()));
    }
    let q = |f: f64| sorted[(sorted.len() as f64 * f) as usize];
    let (lo, hi) = (q(0.001), q(0.999));
    let bins = cfg.yor_bins;
    let edges: Vec<f64> = (0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect();
    let hist = sample.histogram(&edges);
    let masses = density_bin_masses(&p, t, &edges, 6, DensityOptions::default())?;
    let agree = masses.iter().zip(hist.masses()).zip(hist.mass_std_errors()).filter(|((a, m), se)| (*a - m).abs() <= 3.0 * *se).count();
    checks.push(Check::at_least("verhulst density bins within 3 SE (fraction)", agree as f64 / bins as f64, 0.8));
    Ok(())
}

/// Terminal `G_T(T, T)` against `G₀` on an exact coarse grid, for each `ρ`.
fn drift_kill(cfg: &VerifyConfig, seed: u64, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let grid = TimeGrid::uniform(5.0, 5)?;
    for (i, rho) in [-0.8, 0.0, 0.8].into_iter().enumerate() {
        let b = BivariateParams::new(SurvivalCurve::flat(0.08)?, SurvivalCurve::flat(0.125)?, 0.15, 0.25, rho)?;
        let r = if cfg.corrupt_copula { rho } else { copula_correlation(&b) };
        let paths = simulate_bivariate(&b, Maturities::Fixed(5.0, 5.0), &grid, DRIFT_KILL_PATHS, RngSpec::new(seed + i as u64), r)?;
        let z = MeanEstimate::of(&paths.g.terminal()).z_score(paths.g.value(0, 0));
        checks.push(Check::at_most(format!("drift kill rho={rho} |z|"), z, 3.0));
    }
    Ok(())
}

/// Runs the suite, writes the report and fails with the number of failed
/// checks.
pub fn run(cfg: &VerifyConfig, run: &RunSettings, out: &mut Output) -> Result<(), CliError> {
    let n = run.paths.unwrap_or(cfg.paths);
    if n < 100 {
        return Err(CliError::Param(format!("verify needs at least 100 paths, got {n}")));
    }
    let mut checks = Vec::new();
    martingale_checks(n, run.seed, &mut checks)?;
    ks_check(n / 2, run.seed.wrapping_add(10), &mut checks)?;
    driftless_checks(&mut checks)?;
    quadrature_checks(&mut checks)?;
    yor_check(cfg, run.seed.wrapping_add(20), &mut checks)?;
    drift_kill(cfg, run.seed.wrapping_add(30), &mut checks)?;

    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| vec![c.name.clone(), fmt17(c.measured), fmt17(c.tolerance), if c.pass { "pass" } else { "fail" }.to_string()])
        .collect();
    println!("check,measured,tolerance,status");
    for r in &rows {
        println!("{}", r.join(","));
    }
    out.records("verify_report", &["check", "measured", "tolerance", "status"], &rows)?;
    match checks.iter().filter(|c| !c.pass).count() {
        0 => Ok(()),
        failed => Err(CliError::Verification(failed)),
    }
}
