use super::SurvivalCurve;
use crate::error::ensure;
use crate::numerics::{norm_cdf, norm_inv_cdf, norm_pdf};
use crate::sde_engine::{fmt17, map_paths, simulate_rows, PathSet, RngSpec, TimeGrid};
use crate::stats::MeanEstimate;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Survival surface `S_t(T) = Φ(m(t,T) + ηZ_t)` over an initial curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalSurfaceParams {
    pub curve: SurvivalCurve,
    pub eta: f64,
}

/// `Φ⁻¹` extended to the closed interval.
pub(crate) fn probit(p: f64) -> f64 {
    if p >= 1.0 {
        f64::INFINITY
    } else if p <= 0.0 {
        f64::NEG_INFINITY
    } else {
        norm_inv_cdf(p).expect("p in (0, 1)")
    }
}

/// `(e^{x} − 1)/x`, continuous at 0.
pub(crate) fn expm1_ratio(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0 + 0.5 * x
    } else {
        x.exp_m1() / x
    }
}

/// Exact one-step transition of `U = ηZ`: `U' = growth·U + sd·w`.
pub(crate) fn factor_step(eta: f64, dt: f64) -> (f64, f64) {
    let v = eta * eta * dt;
    ((0.5 * v).exp(), v.exp_m1().sqrt())
}

impl SurvivalSurfaceParams {
    pub fn new(curve: SurvivalCurve, eta: f64) -> Result<Self> {
        ensure(eta >= 0.0 && eta.is_finite(), || format!("eta must be finite and >= 0 (got {eta})"))?;
        Ok(Self { curve, eta })
    }

    /// `X₀(T) = Φ⁻¹(S₀(T))`, `+∞` where the curve is still 1.
    pub fn x0(&self, maturity: f64) -> f64 {
        probit(self.curve.survival(maturity))
    }

    /// `m(t, T) = X₀(T)·e^{η²t/2}`.
    pub fn m(&self, t: f64, maturity: f64) -> f64 {
        self.x0(maturity) * (0.5 * self.eta * self.eta * t).exp()
    }

    /// `v(t) = e^{η²t} − 1`, the variance of `ηZ_t`.
    pub fn v(&self, t: f64) -> f64 {
        (self.eta * self.eta * t).exp_m1()
    }

    /// `S_t(T)` given the factor value `ηZ_t = u`.
    pub fn survival_given_factor(&self, t: f64, maturity: f64, u: f64) -> f64 {
        norm_cdf(self.m(t, maturity) + u)
    }
}

/// Simulates the surface at each maturity on the grid, sharing one exact OU
/// factor per path. Returns one [`PathSet`] per maturity, in input order.
pub fn simulate_surface(
    p: &SurvivalSurfaceParams,
    maturities: &[f64],
    grid: &TimeGrid,
    n_paths: usize,
    rng: RngSpec,
) -> Result<Vec<PathSet>> {
    ensure(!maturities.is_empty(), || "at least one maturity is required".into())?;
    ensure(maturities.iter().all(|&t| t >= 0.0 && t.is_finite()), || "maturities must be finite and >= 0".into())?;
    let factor = simulate_factor(p.eta, grid, n_paths, rng)?;
    maturities
        .iter()
        .map(|&mat| {
            let rows = factor
                .iter()
                .map(|u| u.iter().zip(grid.times()).map(|(&u, &t)| p.survival_given_factor(t, mat, u)).collect())
                .collect();
            PathSet::from_rows(grid.clone(), rows, rng.seed, format!("S_t({mat})"))
        })
        .collect()
}

/// Paths of `U = ηZ` on the grid: `U_{k+1} = e^{η²Δ/2} U_k + √(e^{η²Δ} − 1)·w`.
pub(crate) fn simulate_factor(eta: f64, grid: &TimeGrid, n_paths: usize, rng: RngSpec) -> Result<Vec<Vec<f64>>> {
    let steps: Vec<(f64, f64)> = grid.steps().map(|(_, dt)| factor_step(eta, dt)).collect();
    simulate_rows(n_paths, grid.len(), |path, row| {
        let mut u = 0.0;
        row.push(u);
        for (k, &(growth, sd)) in steps.iter().enumerate() {
            u = growth * u + sd * rng.normal(path as u64, k as u32);
            row.push(u);
        }
        Ok(())
    })
}

/// `(ζ_t, η·φ(Φ⁻¹(s_t)))`, the coefficients of
/// `dS_t = ζ_t dS₀(t) + η φ(Φ⁻¹(S_t)) dW_t` for the running-maturity survival.
///
/// At `s_t = S₀(t) = 1` (time zero) the ratio of densities is taken as 1.
pub fn azema_coefficients(p: &SurvivalSurfaceParams, t: f64, s_t: f64) -> Result<(f64, f64)> {
    let growth = (0.5 * p.eta * p.eta * t).exp();
    let s0 = p.curve.survival(t);
    if s_t >= 1.0 && s0 >= 1.0 {
        return Ok((growth, 0.0));
    }
    if !(s_t > 0.0 && s_t < 1.0) {
        return Err(Error::Domain(format!("s_t must lie in (0, 1) (got {s_t})")));
    }
    let num = norm_pdf(probit(s_t));
    let den = norm_pdf(probit(s0));
    Ok((num * growth / den, p.eta * num))
}

/// Strong error of one time-step count in [`azema_strong_error`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongErrorLevel {
    pub n_steps: usize,
    pub dt: f64,
    /// Mean over paths of the sup over coarse grid times of `|S^Euler − S^exact|`.
    pub error: MeanEstimate,
}

/// Euler on the Azéma SDE against the exact `Φ(m(t,t) + ηZ_t)`, level by
/// level, with every level driven by sums of the same fine Brownian
/// increments. The reference uses `refine × max(levels)` steps.
pub fn azema_strong_error(
    p: &SurvivalSurfaceParams,
    horizon: f64,
    levels: &[usize],
    refine: usize,
    n_paths: usize,
    rng: RngSpec,
) -> Result<Vec<StrongErrorLevel>> {
    ensure(!levels.is_empty() && refine >= 1, || "need at least one level and refine >= 1".into())?;
    let n_fine = levels.iter().max().unwrap() * refine;
    ensure(levels.iter().all(|&n| n > 0 && n_fine.is_multiple_of(n)), || "levels must divide the fine step count".into())?;
    let fine = TimeGrid::uniform(horizon, n_fine)?;
    let delta = horizon / n_fine as f64;
    let a = 0.5 * p.eta * p.eta;
    let (decay, half) = ((a * delta).exp(), (0.5 * a * delta).exp());
    let s0: Vec<f64> = fine.times().iter().map(|&t| p.curve.survival(t)).collect();
    let per_path: Vec<Vec<f64>> = map_paths(n_paths, |path| {
        let dw: Vec<f64> = (0..n_fine).map(|j| delta.sqrt() * rng.normal(path as u64, j as u32)).collect();
        // ηZ on the fine grid with the exponential kernel at interval midpoints
        let mut exact = Vec::with_capacity(n_fine + 1);
        let mut u = 0.0;
        exact.push(p.survival_given_factor(0.0, 0.0, 0.0));
        for (j, w) in dw.iter().enumerate() {
            u = decay * u + p.eta * half * w;
            let t = fine.times()[j + 1];
            exact.push(p.survival_given_factor(t, t, u));
        }
        levels
            .iter()
            .map(|&n| {
                let r = n_fine / n;
                let mut s = exact[0];
                let mut worst: f64 = 0.0;
                for k in 0..n {
                    let (j0, j1) = (k * r, (k + 1) * r);
                    let t = fine.times()[j0];
                    let w: f64 = dw[j0..j1].iter().sum();
                    let (zeta, diff) = if s > 0.0 && s < 1.0 || s0[j0] >= 1.0 {
                        azema_coefficients(p, t, s)?
                    } else {
                        (0.0, 0.0)
                    };
                    s = (s + zeta * (s0[j1] - s0[j0]) + diff * w).clamp(0.0, 1.0);
                    worst = worst.max((s - exact[j1]).abs());
                }
                Ok(worst)
            })
            .collect()
    })?;
    Ok(levels
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let errs: Vec<f64> = per_path.iter().map(|e| e[i]).collect();
            StrongErrorLevel { n_steps: n, dt: horizon / n as f64, error: MeanEstimate::of(&errs) }
        })
        .collect())
}

/// Density of `S_t(T)` at `s ∈ (0, 1)`, the derivative of
/// `P(S_t(T) ≤ s) = Φ((Φ⁻¹(s) − m(t,T))/√v(t))`. Zero outside the open
/// interval and when the law is degenerate.
pub fn surface_density(p: &SurvivalSurfaceParams, t: f64, maturity: f64, s: f64) -> f64 {
    let v = p.v(t);
    if !(s > 0.0 && s < 1.0) || v <= 0.0 {
        return 0.0;
    }
    let x = probit(s);
    let sd = v.sqrt();
    norm_pdf((x - p.m(t, maturity)) / sd) / (sd * norm_pdf(x))
}

/// Running-maturity survival `S_t(t)` two ways on one grid and one set of
/// Brownian increments: the exact `Φ(m(t,t) + ηZ_t)` and Euler on the Azéma
/// SDE. Returns `(exact, euler)`.
pub fn azema_paths(p: &SurvivalSurfaceParams, grid: &TimeGrid, n_paths: usize, rng: RngSpec) -> Result<(PathSet, PathSet)> {
    let times = grid.times();
    let s0: Vec<f64> = times.iter().map(|&t| p.curve.survival(t)).collect();
    let steps: Vec<(f64, f64)> = grid.steps().map(|(_, dt)| factor_step(p.eta, dt)).collect();
    let rows = simulate_rows(n_paths, 2 * grid.len(), |path, row| {
        let (mut u, mut s) = (0.0, s0[0]);
        let mut euler = Vec::with_capacity(grid.len());
        row.push(p.survival_given_factor(times[0], times[0], u));
        euler.push(s);
        for (k, (t, dt)) in grid.steps().enumerate() {
            let w = rng.normal(path as u64, k as u32);
            let (growth, sd) = steps[k];
            u = growth * u + sd * w;
            row.push(p.survival_given_factor(t + dt, times[k + 1], u));
            let (zeta, diff) = if s > 0.0 && s < 1.0 || s0[k] >= 1.0 { azema_coefficients(p, t, s)? } else { (0.0, 0.0) };
            s = (s + zeta * (s0[k + 1] - s0[k]) + diff * dt.sqrt() * w).clamp(0.0, 1.0);
            euler.push(s);
        }
        row.extend(euler);
        Ok(())
    })?;
    let n = grid.len();
    let (exact, euler): (Vec<Vec<f64>>, Vec<Vec<f64>>) = rows.into_iter().map(|r| (r[..n].to_vec(), r[n..].to_vec())).unzip();
    Ok((
        PathSet::from_rows(grid.clone(), exact, rng.seed, "S_t(t) exact")?,
        PathSet::from_rows(grid.clone(), euler, rng.seed, "S_t(t) euler")?,
    ))
}

/// Surface export `t,T,path,value`.
pub fn write_surface_csv<W: Write>(maturities: &[f64], surfaces: &[PathSet], mut w: W) -> Result<()> {
    writeln!(w, "t,T,path,value")?;
    for (&mat, set) in maturities.iter().zip(surfaces) {
        for (i, path) in set.paths().enumerate() {
            for (t, v) in set.times().iter().zip(path) {
                writeln!(w, "{},{},{i},{}", fmt17(*t), fmt17(mat), fmt17(*v))?;
            }
        }
    }
    Ok(())
}

/// Summary export `T,mean,stderr,analytic` of the terminal cross-sections
/// against `S₀(T)`.
pub fn write_surface_summary<W: Write>(
    p: &SurvivalSurfaceParams,
    maturities: &[f64],
    surfaces: &[PathSet],
    mut w: W,
) -> Result<()> {
    writeln!(w, "T,mean,stderr,analytic")?;
    for (&mat, set) in maturities.iter().zip(surfaces) {
        let m = set.mean_at(set.n_times() - 1);
        writeln!(w, "{},{},{},{}", fmt17(mat), fmt17(m.mean), fmt17(m.std_error), fmt17(p.curve.survival(mat)))?;
    }
    Ok(())
}
