//! Law of the Verhulst process `dX = λ(η²/2)X² dt + ηX dW`, the latent
//! driver of the exponential conic martingale `Y = e^{−λX}`.
//!
//! `X` explodes once `∫Θ` reaches `2/(λη²)`, where `Θ = X₀e^{ηW − η²t/2}`.
//! Before that its density follows from Yor's conditional law of the
//! integral of geometric Brownian motion, computed here through a
//! steepest-descent form of `θ_r(u)`. A Monte-Carlo oracle built on the
//! explicit solution checks it.

mod density;
mod oracle;
mod yor;

pub use density::{
    conditional_density_a, log_conditional_density_a, verhulst_density, verhulst_density_with, Centering, DensityOptions,
};
pub use oracle::{mc_verhulst_oracle, simulate_verhulst, write_density_csv, Histogram, VerhulstSample};
pub use yor::{log_theta, psi_integral, psi_integral_with_tol, psi_integrand, theta_density, theta_density_direct};

use crate::error::ensure;
use crate::numerics::gauss_legendre;
use crate::Result;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerhulstParams {
    pub x0: f64,
    pub eta: f64,
    pub lambda: f64,
}

impl VerhulstParams {
    pub fn new(x0: f64, eta: f64, lambda: f64) -> Result<Self> {
        for (name, v) in [("x0", x0), ("eta", eta), ("lambda", lambda)] {
            ensure(v > 0.0 && v.is_finite(), || format!("{name} must be positive and finite, got {v}"))?;
        }
        Ok(Self { x0, eta, lambda })
    }

    /// `μ = λη²/2`.
    pub fn mu(&self) -> f64 {
        0.5 * self.lambda * self.eta * self.eta
    }

    /// Level of `∫Θ` at which `X` explodes, `2/(λη²)`.
    pub fn barrier(&self) -> f64 {
        1.0 / self.mu()
    }
}

/// Mass of [`verhulst_density`] over each bin `[edges[i], edges[i+1]]`, by
/// Gauss–Legendre with `nodes` points per bin.
pub fn density_bin_masses(p: &VerhulstParams, t: f64, edges: &[f64], nodes: usize, opts: DensityOptions) -> Result<Vec<f64>> {
    let (z, w) = gauss_legendre(nodes);
    edges
        .windows(2)
        .map(|e| {
            let (c, h) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
            z.iter().zip(&w).try_fold(0.0, |acc, (&zi, &wi)| Ok(acc + wi * h * verhulst_density_with(p, t, c + h * zi, opts)?))
        })
        .collect()
}
