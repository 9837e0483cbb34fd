use super::Mapping;
use crate::numerics::norm_cdf;
use crate::sde_engine::{
    euler_path, map_paths, quadratic_variation, simulate_rows, PathSet, PathSummary, RngSpec, TimeGrid,
};
use crate::{Error, Result};

/// Score drift `μ(t, x) = g²(t)/2 · ψ(x)` that makes `F(X)` driftless.
pub fn latent_drift<'a, G>(m: &'a Mapping, g: G) -> impl Fn(f64, f64) -> f64 + Sync + 'a
where
    G: Fn(f64) -> f64 + Sync + 'a,
{
    move |t, x| {
        let gt = g(t);
        if gt == 0.0 {
            0.0
        } else {
            0.5 * gt * gt * m.score(x)
        }
    }
}

/// `σ(t, y) = f(F⁻¹(y)) · η(t, x)` with `x` the original-orientation
/// preimage of `y`. Zero at and beyond the image endpoints.
pub fn mapped_sigma<'a, E>(m: &'a Mapping, eta: E) -> impl Fn(f64, f64) -> f64 + Sync + 'a
where
    E: Fn(f64, f64) -> f64 + Sync + 'a,
{
    move |t, y| match m.inverse(y) {
        Ok(x) => m.density(x) * eta(t, m.orientation() * x),
        Err(_) => 0.0,
    }
}

/// Maps latent states through `F`, absorbing at an endpoint once reached.
struct Absorbing<'a> {
    m: &'a Mapping,
    hit: Option<f64>,
}

impl Absorbing<'_> {
    fn map(&mut self, x: f64) -> f64 {
        if let Some(y) = self.hit {
            return y;
        }
        let y = self.m.value(x);
        let (a, b) = self.m.image();
        if y <= a || y >= b {
            self.hit = Some(y.clamp(a, b));
            return y.clamp(a, b);
        }
        y
    }
}

fn latent_start(m: &Mapping, y0: f64) -> Result<f64> {
    m.inverse(y0).map_err(|_| Error::Domain(format!("y0 = {y0} must lie inside the image {:?}", m.image())))
}

/// Simulates `X` by Euler with the score drift and diffusion `g(t)`, from
/// `F⁻¹(y0)`, and returns the mapped paths `F(X)`.
pub fn simulate_conic<G>(m: &Mapping, g: G, y0: f64, grid: &TimeGrid, n_paths: usize, rng: RngSpec) -> Result<PathSet>
where
    G: Fn(f64) -> f64 + Sync,
{
    let x0 = latent_start(m, y0)?;
    let mu = latent_drift(m, &g);
    let eta = |t: f64, _x: f64| g(t);
    let rows = simulate_rows(n_paths, grid.len(), |p, row| {
        let mut abs = Absorbing { m, hit: None };
        euler_path(p, &mu, &eta, x0, grid, rng, |x| row.push(abs.map(x)))
    })?;
    PathSet::from_rows(grid.clone(), rows, rng.seed, "conic")
}

/// [`simulate_conic`] reduced to per-path terminal values and extremes.
pub fn simulate_conic_summaries<G>(
    m: &Mapping,
    g: G,
    y0: f64,
    grid: &TimeGrid,
    n_paths: usize,
    rng: RngSpec,
) -> Result<Vec<PathSummary>>
where
    G: Fn(f64) -> f64 + Sync,
{
    let x0 = latent_start(m, y0)?;
    let mu = latent_drift(m, &g);
    let eta = |t: f64, _x: f64| g(t);
    map_paths(n_paths, |p| {
        let mut abs = Absorbing { m, hit: None };
        let mut s = PathSummary::start(y0);
        euler_path(p, &mu, &eta, x0, grid, rng, |x| s.push(abs.map(x)))?;
        Ok(s)
    })
}

/// `M_t = Φ(Z_t / √(1 − [Z]_t))` with `dZ = σ(t) dW`, `Z_0 = z0`.
///
/// The Gaussian increments of `Z` use the same midpoint-rule variances as
/// `[Z]`, so `M` is an exact martingale on the grid.
pub fn doleans_phi<S>(sigma_t: S, z0: f64, grid: &TimeGrid, n_paths: usize, rng: RngSpec) -> Result<PathSet>
where
    S: Fn(f64) -> f64 + Sync,
{
    let qv = quadratic_variation(&sigma_t, grid);
    if let Some(k) = qv.iter().position(|&q| q >= 1.0) {
        // [Z] is piecewise linear between grid times
        let (t0, t1) = (grid.times()[k - 1], grid.times()[k]);
        let tau = t0 + (1.0 - qv[k - 1]) / (qv[k] - qv[k - 1]) * (t1 - t0);
        return Err(Error::Horizon { tau });
    }
    let scale: Vec<f64> = qv.iter().map(|q| 1.0 / (1.0 - q).sqrt()).collect();
    let sd: Vec<f64> = qv.windows(2).map(|w| (w[1] - w[0]).sqrt()).collect();
    let rows = simulate_rows(n_paths, grid.len(), |p, row| {
        let mut z = z0;
        row.push(norm_cdf(z * scale[0]));
        for (k, s) in sd.iter().enumerate() {
            z += s * rng.normal(p as u64, k as u32);
            row.push(norm_cdf(z * scale[k + 1]));
        }
        Ok(())
    })?;
    PathSet::from_rows(grid.clone(), rows, rng.seed, "doleans-phi")
}

/// `max |μ(t,x)·f(x) + g²(t)/2 · f′(x)|` over the sample points, the drift of
/// `F(X)` when `X` has drift `μ` and diffusion `g`.
pub fn driftless_residual<M, G>(m: &Mapping, drift: M, g: G, times: &[f64], xs: &[f64]) -> f64
where
    M: Fn(f64, f64) -> f64,
    G: Fn(f64) -> f64,
{
    let mut worst = 0.0f64;
    for &t in times {
        let gt = g(t);
        for &x in xs {
            let r = drift(t, x) * m.density(x) + 0.5 * gt * gt * m.density_derivative(x);
            worst = worst.max(r.abs());
        }
    }
    worst
}

/// [`driftless_residual`] for the mapping's own score drift.
pub fn verify_driftless<G>(m: &Mapping, g: G, times: &[f64], xs: &[f64]) -> f64
where
    G: Fn(f64) -> f64 + Sync,
{
    driftless_residual(m, latent_drift(m, &g), &g, times, xs)
}
