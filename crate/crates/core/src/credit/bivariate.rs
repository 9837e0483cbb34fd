use super::surface::{expm1_ratio, probit};
use super::SurvivalCurve;
use crate::error::ensure;
use crate::numerics::{bvn_cdf, bvn_partials, norm_cdf, norm_pdf};
use crate::sde_engine::{simulate_rows, PathSet, RngSpec, TimeGrid};
use crate::Result;
use serde::{Deserialize, Serialize};

/// Two survival surfaces driven by Brownian motions with correlation `rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivariateParams {
    pub curve1: SurvivalCurve,
    pub curve2: SurvivalCurve,
    pub eta1: f64,
    pub eta2: f64,
    pub rho: f64,
}

/// Maturities at which the joint survival is read.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Maturities {
    /// `G_t(T₁, T₂)` for fixed maturities.
    Fixed(f64, f64),
    /// `G_t(t, t)`, maturity equal to the running time.
    Running,
}

impl Maturities {
    fn at(self, t: f64) -> (f64, f64) {
        match self {
            Maturities::Fixed(a, b) => (a, b),
            Maturities::Running => (t, t),
        }
    }
}

impl BivariateParams {
    pub fn new(curve1: SurvivalCurve, curve2: SurvivalCurve, eta1: f64, eta2: f64, rho: f64) -> Result<Self> {
        ensure(eta1 >= 0.0 && eta2 >= 0.0 && eta1.is_finite() && eta2.is_finite(), || "etas must be finite and >= 0".into())?;
        ensure(eta1 > 0.0 || eta2 > 0.0, || "at least one eta must be positive".into())?;
        ensure((-1.0..=1.0).contains(&rho), || format!("rho must lie in [-1, 1] (got {rho})"))?;
        Ok(Self { curve1, curve2, eta1, eta2, rho })
    }

    /// `μ_i = η_i²/2`.
    pub fn mu(&self) -> (f64, f64) {
        (0.5 * self.eta1 * self.eta1, 0.5 * self.eta2 * self.eta2)
    }

    /// `X^i_t(T) = X^i_0(T)·e^{μ_i t}` plus the factor value.
    fn latent_means(&self, t: f64, m1: f64, m2: f64) -> (f64, f64) {
        let (mu1, mu2) = self.mu();
        (probit(self.curve1.survival(m1)) * (mu1 * t).exp(), probit(self.curve2.survival(m2)) * (mu2 * t).exp())
    }

    /// `G₀(T₁, T₂) = Φ₂(X¹₀(T₁), X²₀(T₂); r)` under the copula correlation.
    pub fn initial_joint_survival(&self, t1: f64, t2: f64) -> f64 {
        let (x1, x2) = self.latent_means(0.0, t1, t2);
        bvn_cdf(x1, x2, copula_correlation(self)).expect("validated correlation")
    }
}

/// Drift-killing copula correlation `r = 2ρη₁η₂/(η₁² + η₂²)`.
pub fn copula_correlation(b: &BivariateParams) -> f64 {
    2.0 * b.rho * b.eta1 * b.eta2 / (b.eta1 * b.eta1 + b.eta2 * b.eta2)
}

/// Simulated marginal and joint survival paths.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePaths {
    pub s1: PathSet,
    pub s2: PathSet,
    pub g: PathSet,
}

/// `G_t = Φ₂(X¹_t, X²_t; r)` with the copula correlation.
pub fn bivariate_surface(
    b: &BivariateParams,
    maturities: Maturities,
    grid: &TimeGrid,
    n_paths: usize,
    rng: RngSpec,
) -> Result<PathSet> {
    Ok(simulate_bivariate(b, maturities, grid, n_paths, rng, copula_correlation(b))?.g)
}

/// Joint simulation with an explicit copula correlation `r`, which need not
/// be the drift-killing one. The factor pair uses exact correlated Gaussian
/// transitions built from the normals of streams 0 and 1 of `rng`, so runs
/// with different `rho` share the same underlying draws.
pub fn simulate_bivariate(
    b: &BivariateParams,
    maturities: Maturities,
    grid: &TimeGrid,
    n_paths: usize,
    rng: RngSpec,
    r: f64,
) -> Result<BivariatePaths> {
    ensure((-1.0..=1.0).contains(&r), || format!("copula correlation must lie in [-1, 1] (got {r})"))?;
    let (a1, a2) = b.mu();
    let steps: Vec<[f64; 5]> = grid
        .steps()
        .map(|(_, dt)| {
            let sd1 = (b.eta1 * b.eta1 * dt).exp_m1().sqrt();
            let sd2 = (b.eta2 * b.eta2 * dt).exp_m1().sqrt();
            let cov = b.rho * b.eta1 * b.eta2 * dt * expm1_ratio((a1 + a2) * dt);
            let c = if sd1 > 0.0 && sd2 > 0.0 { (cov / (sd1 * sd2)).clamp(-1.0, 1.0) } else { 0.0 };
            [(a1 * dt).exp(), (a2 * dt).exp(), sd1, sd2 * c, sd2 * (1.0 - c * c).sqrt()]
        })
        .collect();
    let second = rng.with_stream(1);
    let rows = simulate_rows(n_paths, 3 * grid.len(), |path, row| {
        let (mut u1, mut u2) = (0.0, 0.0);
        for (k, &t) in grid.times().iter().enumerate() {
            if k > 0 {
                let [g1, g2, s11, s21, s22] = steps[k - 1];
                let (w1, w2) = (rng.normal(path as u64, (k - 1) as u32), second.normal(path as u64, (k - 1) as u32));
                u1 = g1 * u1 + s11 * w1;
                u2 = g2 * u2 + s21 * w1 + s22 * w2;
            }
            let (m1, m2) = maturities.at(t);
            let (x1, x2) = b.latent_means(t, m1, m2);
            let (x1, x2) = (x1 + u1, x2 + u2);
            row.extend_from_slice(&[norm_cdf(x1), norm_cdf(x2), bvn_cdf(x1, x2, r)?]);
        }
        Ok(())
    })?;
    let split = |j: usize| -> Vec<Vec<f64>> { rows.iter().map(|r| r.iter().skip(j).step_by(3).copied().collect()).collect() };
    Ok(BivariatePaths {
        s1: PathSet::from_rows(grid.clone(), split(0), rng.seed, "S1")?,
        s2: PathSet::from_rows(grid.clone(), split(1), rng.seed, "S2")?,
        g: PathSet::from_rows(grid.clone(), split(2), rng.seed, "G")?,
    })
}

/// `ξ^i_t = e^{μ_i t}·h_i(Φ⁻¹(S¹_t), Φ⁻¹(S²_t); r) / φ(Φ⁻¹(S^i_0(t)))`, with
/// `h_i` the partial derivative of `Φ₂` in its `i`-th argument. These are the
/// loadings on `dS^i_0(t)` in `dG_t(t, t)`.
pub fn bivariate_azema_coefficients(b: &BivariateParams, t: f64, s1: f64, s2: f64) -> Result<(f64, f64)> {
    ensure(s1 > 0.0 && s1 < 1.0 && s2 > 0.0 && s2 < 1.0, || format!("survivals must lie in (0, 1) (got {s1}, {s2})"))?;
    let r = copula_correlation(b);
    let (x1, x2) = (probit(s1), probit(s2));
    let (h1, _) = bvn_partials(x1, x2, r)?;
    let (h2, _) = bvn_partials(x2, x1, r)?;
    let (mu1, mu2) = b.mu();
    let d1 = norm_pdf(probit(b.curve1.survival(t)));
    let d2 = norm_pdf(probit(b.curve2.survival(t)));
    Ok(((mu1 * t).exp() * h1 / d1, (mu2 * t).exp() * h2 / d2))
}
