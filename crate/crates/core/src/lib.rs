//! Conic martingales: bounded martingales built by mapping Gaussian
//! diffusions through smooth monotone functions, and their use as
//! stochastic survival-probability models.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: normal distribution functions, the bivariate normal CDF,
//!   Gauss–Hermite quadrature and bracketed root finding.
//! * [`sde_engine`]: seeded, thread-count independent path simulation.
//! * [`conic_core`]: mappings `Y = F(X)`, latent drifts, mapped diffusion
//!   coefficients and the Doléans-Φ map.
//! * [`phi_martingale`]: closed-form statistics of `Y = Φ(X)` with `X` Vasicek.
//! * [`credit`]: survival surfaces, conditional survival and the bivariate
//!   Gaussian-copula survival martingale.
//! * [`verhulst_yor`]: the law of the Verhulst latent process through Yor's
//!   density of the integral of geometric Brownian motion.

pub mod conic_core;
pub mod credit;
mod error;
pub mod numerics;
pub mod phi_martingale;
pub mod sde_engine;
pub mod stats;
pub mod verhulst_yor;

pub use error::{Error, Result};
