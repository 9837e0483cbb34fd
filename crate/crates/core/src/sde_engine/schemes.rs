use super::{PathSet, RngSpec, TimeGrid};
use crate::numerics::gauss_legendre;
use crate::{Error, Result};
use rayon::prelude::*;
use std::sync::Arc;

/// Deterministic function of time, shareable across worker threads.
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Runs `fill(path, row)` for every path in parallel and returns the rows in
/// path order. On failure the error of the lowest-indexed failing path wins,
/// so diagnostics do not depend on scheduling.
pub fn simulate_rows<F>(n_paths: usize, n_times: usize, fill: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(usize, &mut Vec<f64>) -> Result<()> + Sync,
{
    map_paths(n_paths, |p| {
        let mut row = Vec::with_capacity(n_times);
        fill(p, &mut row).map(|_| row)
    })
}

fn check(path: usize, step: usize, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::PathNumeric { path, step, value })
    }
}

/// Euler–Maruyama for `dY = σ(t, Y) dW`.
pub fn euler_driftless<S>(sigma: S, y0: f64, grid: &TimeGrid, n_paths: usize, rng: RngSpec) -> Result<PathSet>
where
    S: Fn(f64, f64) -> f64 + Sync,
{
    euler_drifted(|_, _| 0.0, sigma, y0, grid, n_paths, rng)
}

/// Euler–Maruyama for `dX = μ(t, X) dt + η(t, X) dW`. Draws exactly the same
/// normals as [`euler_driftless`] for the same `rng`.
pub fn euler_drifted<M, S>(mu: M, eta: S, x0: f64, grid: &TimeGrid, n_paths: usize, rng: RngSpec) -> Result<PathSet>
where
    M: Fn(f64, f64) -> f64 + Sync,
    S: Fn(f64, f64) -> f64 + Sync,
{
    let rows = simulate_rows(n_paths, grid.len(), |p, row| euler_path(p, &mu, &eta, x0, grid, rng, |x| row.push(x)))?;
    PathSet::from_rows(grid.clone(), rows, rng.seed, "euler")
}

/// Walks a single Euler path, handing every grid-time state (the initial
/// one included) to `visit`. This is the scheme behind [`euler_drifted`], so
/// callers that only need a reduction of each path see identical values.
pub fn euler_path<M, S>(
    path: usize,
    mu: &M,
    eta: &S,
    x0: f64,
    grid: &TimeGrid,
    rng: RngSpec,
    mut visit: impl FnMut(f64),
) -> Result<()>
where
    M: Fn(f64, f64) -> f64,
    S: Fn(f64, f64) -> f64,
{
    let mut x = check(path, 0, x0)?;
    visit(x);
    for (k, (t, dt)) in grid.steps().enumerate() {
        let m = check(path, k, mu(t, x))?;
        let s = check(path, k, eta(t, x))?;
        x = x + m * dt + s * dt.sqrt() * rng.normal(path as u64, k as u32);
        visit(check(path, k + 1, x)?);
    }
    Ok(())
}

/// Terminal value and visited extremes of one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSummary {
    pub terminal: f64,
    pub min: f64,
    pub max: f64,
}

impl PathSummary {
    pub fn start(x: f64) -> Self {
        Self { terminal: x, min: x, max: x }
    }

    pub fn push(&mut self, x: f64) {
        self.terminal = x;
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }
}

/// Like [`euler_drifted`] but keeps only a [`PathSummary`] per path, for
/// path counts whose full trajectories would not fit in memory.
pub fn euler_summaries<M, S>(mu: M, eta: S, x0: f64, grid: &TimeGrid, n_paths: usize, rng: RngSpec) -> Result<Vec<PathSummary>>
where
    M: Fn(f64, f64) -> f64 + Sync,
    S: Fn(f64, f64) -> f64 + Sync,
{
    map_paths(n_paths, |p| {
        let mut s = PathSummary::start(x0);
        euler_path(p, &mu, &eta, x0, grid, rng, |x| s.push(x))?;
        Ok(s)
    })
}

/// Evaluates `f(path)` for every path in parallel, in path order; the error
/// of the lowest failing path is returned.
pub fn map_paths<T: Send>(n_paths: usize, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    if n_paths == 0 {
        return Err(Error::Domain("n_paths must be at least 1".into()));
    }
    let out: Vec<Result<T>> = (0..n_paths).into_par_iter().map(&f).collect();
    out.into_iter().collect()
}

/// I.i.d. draws of `x0·e^{η²t/2} + √(e^{η²t} − 1)·Z`, the time-`t` law of
/// `dX = (η²/2) X dt + η dW`. Draw `i` uses the normal at `(i, 0)`.
pub fn sample_vasicek_exact(x0: f64, eta: f64, t: f64, n: usize, rng: RngSpec) -> Result<Vec<f64>> {
    if !(eta >= 0.0 && t >= 0.0) || !x0.is_finite() {
        return Err(Error::Domain(format!("vasicek sampler needs eta >= 0, t >= 0 (got {eta}, {t})")));
    }
    let v = eta * eta * t;
    let mean = x0 * (0.5 * v).exp();
    let sd = v.exp_m1().sqrt();
    Ok((0..n).into_par_iter().map(|i| mean + sd * rng.normal(i as u64, 0)).collect())
}

/// Cumulative `∫₀^{t_k} σ²(s) ds` by the midpoint rule on each grid interval.
pub fn quadratic_variation<S: Fn(f64) -> f64>(sigma_t: S, grid: &TimeGrid) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(grid.len());
    out.push(0.0);
    for (t, dt) in grid.steps() {
        let s = sigma_t(t + 0.5 * dt);
        acc += s * s * dt;
        out.push(acc);
    }
    out
}

/// `dX = (a(t) + b(t) X) dt + γ(t) dW`, `X₀ = x0`.
#[derive(Clone)]
pub struct GaussianDiffusionParams {
    pub a: TimeFn,
    pub b: TimeFn,
    pub gamma: TimeFn,
    pub x0: f64,
}

impl std::fmt::Debug for GaussianDiffusionParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GaussianDiffusionParams").field("x0", &self.x0).finish_non_exhaustive()
    }
}

impl GaussianDiffusionParams {
    /// The latent process of the Φ-martingale: `a = 0`, `b = η²/2`, `γ = η`.
    pub fn vasicek(x0: f64, eta: f64) -> Self {
        Self {
            a: Arc::new(|_| 0.0),
            b: Arc::new(move |_| 0.5 * eta * eta),
            gamma: Arc::new(move |_| eta),
            x0,
        }
    }

    /// Drift `μ(t, x) = a(t) + b(t)·x`.
    pub fn drift(&self, t: f64, x: f64) -> f64 {
        (self.a)(t) + (self.b)(t) * x
    }

    pub fn validate(&self, grid: &TimeGrid) -> Result<()> {
        for &t in grid.times() {
            let (a, b, g) = ((self.a)(t), (self.b)(t), (self.gamma)(t));
            if !(a.is_finite() && b.is_finite() && g.is_finite() && g >= 0.0) {
                return Err(Error::Domain(format!("diffusion coefficients invalid at t = {t}: a={a}, b={b}, gamma={g}")));
            }
        }
        if !self.x0.is_finite() {
            return Err(Error::Domain("x0 must be finite".into()));
        }
        Ok(())
    }

    /// Exact one-step transition over `[t0, t1]`: `X₁ = growth·X₀ + shift + sd·Z`.
    /// Time integrals use nested Gauss–Legendre quadrature, exact when the
    /// coefficients are low-degree polynomials in time.
    pub fn transition(&self, t0: f64, t1: f64) -> (f64, f64, f64) {
        let (nodes, weights) = legendre16();
        let h = t1 - t0;
        let on = |lo: f64, hi: f64, f: &dyn Fn(f64) -> f64| -> f64 {
            let half = 0.5 * (hi - lo);
            nodes.iter().zip(weights).map(|(x, w)| w * f(lo + half * (x + 1.0))).sum::<f64>() * half
        };
        let b_from = |s: f64| on(s, t1, &|u| (self.b)(u));
        let growth = b_from(t0).exp();
        let shift = on(t0, t1, &|s| b_from(s).exp() * (self.a)(s));
        let var = on(t0, t1, &|s| {
            let g = (self.gamma)(s);
            (2.0 * b_from(s)).exp() * g * g
        });
        debug_assert!(h > 0.0);
        (growth, shift, var.max(0.0).sqrt())
    }
}

fn legendre16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: std::sync::OnceLock<(Vec<f64>, Vec<f64>)> = std::sync::OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Samples the Gaussian diffusion exactly on the grid; step `k` of path `p`
/// uses the normal at `(p, k)`.
pub fn simulate_gaussian_diffusion(
    params: &GaussianDiffusionParams,
    grid: &TimeGrid,
    n_paths: usize,
    rng: RngSpec,
) -> Result<PathSet> {
    params.validate(grid)?;
    let steps: Vec<(f64, f64, f64)> = grid.steps().map(|(t, dt)| params.transition(t, t + dt)).collect();
    let rows = simulate_rows(n_paths, grid.len(), |p, row| {
        let mut x = params.x0;
        row.push(x);
        for (k, &(growth, shift, sd)) in steps.iter().enumerate() {
            x = growth * x + shift + sd * rng.normal(p as u64, k as u32);
            row.push(check(p, k + 1, x)?);
        }
        Ok(())
    })?;
    PathSet::from_rows(grid.clone(), rows, rng.seed, "gaussian-diffusion")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{self, MeanEstimate};

    #[test]
    fn zero_sigma_is_constant() {
        let g = TimeGrid::uniform(1.0, 10).unwrap();
        let p = euler_driftless(|_, _| 0.0, 0.3, &g, 5, RngSpec::new(1)).unwrap();
        assert!(p.paths().all(|r| r.iter().all(|&v| v == 0.3)));
    }

    #[test]
    fn one_step_matches_scheme_definition() {
        let g = TimeGrid::new(vec![0.0, 0.25]).unwrap();
        let rng = RngSpec::new(5);
        let p = euler_driftless(|_, y| 0.2 * y + 0.1, 0.5, &g, 3, rng).unwrap();
        for i in 0..3 {
            assert_eq!(p.value(i, 1), 0.5 + 0.2f64.mul_add(0.5, 0.1) * 0.5 * rng.normal(i as u64, 0));
        }
    }

    #[test]
    fn gbm_is_a_martingale() {
        let g = TimeGrid::uniform(1.0, 50).unwrap();
        let p = euler_driftless(|_, y| 0.4 * y, 1.0, &g, 40_000, RngSpec::new(11)).unwrap();
        let m = p.mean_at(g.n_steps());
        assert!((m.mean - 1.0).abs() < 3.0 * m.std_error, "{m:?}");
    }

    #[test]
    fn zero_drift_matches_driftless_bitwise() {
        let g = TimeGrid::uniform(2.0, 20).unwrap();
        let rng = RngSpec::new(77);
        let s = |_: f64, y: f64| 0.3 * (1.0 - y * y).max(0.0);
        let a = euler_driftless(s, 0.1, &g, 64, rng).unwrap();
        let b = euler_drifted(|_, _| 0.0, s, 0.1, &g, 64, rng).unwrap();
        assert_eq!(a.paths().collect::<Vec<_>>(), b.paths().collect::<Vec<_>>());
    }

    #[test]
    fn summaries_match_full_paths() {
        let g = TimeGrid::uniform(1.0, 40).unwrap();
        let rng = RngSpec::new(21);
        let full = euler_drifted(|_, x| -x, |_, _| 0.5, 0.2, &g, 30, rng).unwrap();
        let sum = euler_summaries(|_, x| -x, |_, _| 0.5, 0.2, &g, 30, rng).unwrap();
        for (p, s) in full.paths().zip(&sum) {
            assert_eq!(s.terminal, p[40]);
            assert_eq!(s.min, p.iter().copied().fold(f64::INFINITY, f64::min));
            assert_eq!(s.max, p.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        }
    }

    #[test]
    fn ode_limit() {
        let g = TimeGrid::uniform(1.0, 8).unwrap();
        let p = euler_drifted(|_, _| 0.5, |_, _| 0.0, 2.0, &g, 2, RngSpec::new(0)).unwrap();
        for (k, t) in g.times().iter().enumerate() {
            assert!((p.value(1, k) - (2.0 + 0.5 * t)).abs() < 1e-15);
        }
    }

    #[test]
    fn euler_vasicek_matches_exact_mean() {
        let (x0, eta, t) = (0.5, 0.6, 2.0);
        let g = TimeGrid::uniform(t, 200).unwrap();
        let p = euler_drifted(|_, x| 0.5 * eta * eta * x, |_, _| eta, x0, &g, 40_000, RngSpec::new(3)).unwrap();
        let exact = sample_vasicek_exact(x0, eta, t, 40_000, RngSpec::new(4)).unwrap();
        let (me, mx) = (p.mean_at(g.n_steps()), MeanEstimate::of(&exact));
        let target = x0 * (0.5 * eta * eta * t).exp();
        let se = me.std_error.hypot(mx.std_error);
        assert!((me.mean - target).abs() < 3.0 * me.std_error);
        assert!((me.mean - mx.mean).abs() < 3.0 * se);
    }

    #[test]
    fn non_finite_sigma_reports_lowest_path() {
        let g = TimeGrid::uniform(1.0, 4).unwrap();
        let e = euler_driftless(|t, _| if t > 0.4 { f64::NAN } else { 1.0 }, 0.0, &g, 100, RngSpec::new(1));
        assert!(matches!(e.unwrap_err(), Error::PathNumeric { path: 0, step: 2, value } if value.is_nan()));
    }

    #[test]
    fn thread_count_does_not_change_paths() {
        let g = TimeGrid::uniform(1.0, 30).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| euler_driftless(|_, y| 0.2 * y, 1.0, &g, 257, RngSpec::new(8)).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn vasicek_exact_moments() {
        assert!(sample_vasicek_exact(0.7, 0.0, 3.0, 10, RngSpec::new(0)).unwrap().iter().all(|&x| x == 0.7));
        let (x0, eta, t) = (0.3, 0.5, 4.0);
        let xs = sample_vasicek_exact(x0, eta, t, 200_000, RngSpec::new(12)).unwrap();
        let m = MeanEstimate::of(&xs);
        assert!(m.z_score(x0 * (0.5 * eta * eta * t).exp()) < 3.0);
        let v = (eta * eta * t).exp_m1();
        assert!((stats::variance(&xs) - v).abs() < 4.0 * stats::variance_std_error(&xs));
    }

    #[test]
    fn quadratic_variation_examples() {
        let g = TimeGrid::uniform(3.0, 30).unwrap();
        let qv = quadratic_variation(|_| 0.4, &g);
        for (q, t) in qv.iter().zip(g.times()) {
            assert!((q - 0.16 * t).abs() < 1e-15);
        }
        let eta = 0.8;
        let long = TimeGrid::uniform(60.0, 60_000).unwrap();
        let qv = quadratic_variation(|t| eta * (-0.5 * eta * eta * t).exp(), &long);
        assert!((qv.last().unwrap() - 1.0).abs() < 1e-6);
        assert!(qv.windows(2).all(|w| w[1] >= w[0]));
        assert!(quadratic_variation(|_| 0.0, &g).iter().all(|&q| q == 0.0));
    }

    #[test]
    fn gaussian_diffusion_transition_matches_vasicek() {
        let eta = 0.7;
        let p = GaussianDiffusionParams::vasicek(0.4, eta);
        let (growth, shift, sd) = p.transition(0.0, 2.0);
        assert!((growth - (eta * eta).exp()).abs() < 1e-14);
        assert_eq!(shift, 0.0);
        assert!((sd - (2.0 * eta * eta).exp_m1().sqrt()).abs() < 1e-13);
    }

    #[test]
    fn gaussian_diffusion_general_coefficients() {
        // OU with time-dependent mean: dX = (1 - X) dt + 0.5 dW
        let p = GaussianDiffusionParams {
            a: Arc::new(|_| 1.0),
            b: Arc::new(|_| -1.0),
            gamma: Arc::new(|_| 0.5),
            x0: 0.0,
        };
        let (g, s, sd) = p.transition(0.0, 1.5);
        assert!((g - (-1.5f64).exp()).abs() < 1e-14);
        assert!((s - (1.0 - (-1.5f64).exp())).abs() < 1e-14);
        assert!((sd * sd - 0.125 * (1.0 - (-3.0f64).exp())).abs() < 1e-14);
        let grid = TimeGrid::uniform(1.5, 6).unwrap();
        let paths = simulate_gaussian_diffusion(&p, &grid, 50_000, RngSpec::new(6)).unwrap();
        assert!(paths.mean_at(6).z_score(1.0 - (-1.5f64).exp()) < 4.0);
    }
}
