use super::VerhulstParams;
use crate::error::ensure;
use crate::sde_engine::{fmt17, map_paths, simulate_rows, PathSet, RngSpec, TimeGrid};
use crate::Result;
use std::io::Write;

/// Terminal sample of the Verhulst process from the explicit solution
/// `X_t = Θ_t/(1 − μ∫₀^tΘ_s ds)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerhulstSample {
    /// `X_t` on the paths whose integral stayed below the barrier, in path order.
    pub survivors: Vec<f64>,
    pub n_paths: usize,
}

impl VerhulstSample {
    pub fn exploded(&self) -> usize {
        self.n_paths - self.survivors.len()
    }

    pub fn explosion_fraction(&self) -> f64 {
        self.exploded() as f64 / self.n_paths as f64
    }

    pub fn histogram(&self, edges: &[f64]) -> Histogram {
        Histogram::from_sample(&self.survivors, edges, self.n_paths)
    }
}

/// Counts per bin, normalised by the total number of paths (exploded ones
/// included), so the bin masses estimate a sub-probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub n_total: usize,
}

impl Histogram {
    pub fn from_sample(sample: &[f64], edges: &[f64], n_total: usize) -> Self {
        let mut counts = vec![0; edges.len().saturating_sub(1)];
        for &x in sample {
            let i = edges.partition_point(|&e| e <= x);
            if i >= 1 && i < edges.len() {
                counts[i - 1] += 1;
            }
        }
        Self { edges: edges.to_vec(), counts, n_total }
    }

    /// Empirical mass of each bin.
    pub fn masses(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.n_total as f64).collect()
    }

    /// Binomial standard error of each bin mass.
    pub fn mass_std_errors(&self) -> Vec<f64> {
        let n = self.n_total as f64;
        self.masses().iter().map(|&p| (p * (1.0 - p) / n).sqrt()).collect()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Simulates `Θ` exactly on a uniform grid, integrates it by the trapezoid
/// rule and drops the paths whose integral reaches `2/(λη²)`.
pub fn mc_verhulst_oracle(p: &VerhulstParams, t: f64, n_paths: usize, n_steps: usize, rng: RngSpec) -> Result<VerhulstSample> {
    ensure(t > 0.0 && t.is_finite(), || format!("t must be positive, got {t}"))?;
    ensure(n_paths > 0 && n_steps > 0, || "n_paths and n_steps must be positive".into())?;
    let dt = t / n_steps as f64;
    let (vol, drift) = (p.eta * dt.sqrt(), -0.5 * p.eta * p.eta * dt);
    let barrier = p.barrier();
    let terminal = map_paths(n_paths, |i| {
        let mut theta = p.x0;
        let mut integral = 0.0;
        for k in 0..n_steps {
            let next = theta * (drift + vol * rng.normal(i as u64, k as u32)).exp();
            integral += 0.5 * (theta + next) * dt;
            theta = next;
            if integral >= barrier {
                return Ok(None);
            }
        }
        Ok(Some(theta / (1.0 - integral / barrier)))
    })?;
    Ok(VerhulstSample { survivors: terminal.into_iter().flatten().collect(), n_paths })
}

/// Paths of the mapped martingale `Y = e^{−λX}`, absorbed at 0 from the
/// first grid time at which the integral reaches the barrier.
pub fn simulate_verhulst(p: &VerhulstParams, grid: &TimeGrid, n_paths: usize, rng: RngSpec) -> Result<PathSet> {
    let barrier = p.barrier();
    let rows = simulate_rows(n_paths, grid.len(), |i, row| {
        let mut theta = p.x0;
        let mut integral = 0.0;
        let mut alive = true;
        row.push((-p.lambda * p.x0).exp());
        for (k, (_, dt)) in grid.steps().enumerate() {
            if alive {
                let w = rng.normal(i as u64, k as u32);
                let next = theta * (p.eta * dt.sqrt() * w - 0.5 * p.eta * p.eta * dt).exp();
                integral += 0.5 * (theta + next) * dt;
                theta = next;
                alive = integral < barrier;
            }
            row.push(if alive { (-p.lambda * theta / (1.0 - integral / barrier)).exp() } else { 0.0 });
        }
        Ok(())
    })?;
    PathSet::from_rows(grid.clone(), rows, rng.seed, "verhulst")
}

/// Writes `z,f_analytic,f_mc,bin_se`, one row per histogram bin, with the
/// analytic column given as a bin-averaged density.
pub fn write_density_csv<W: Write>(hist: &Histogram, analytic_mass: &[f64], mut w: W) -> Result<()> {
    writeln!(w, "z,f_analytic,f_mc,bin_se")?;
    let masses = hist.masses();
    let ses = hist.mass_std_errors();
    for (i, (z, width)) in hist.centers().into_iter().zip(hist.widths()).enumerate() {
        writeln!(
            w,
            "{},{},{},{}",
            fmt17(z),
            fmt17(analytic_mass[i] / width),
            fmt17(masses[i] / width),
            fmt17(ses[i] / width)
        )?;
    }
    Ok(())
}
