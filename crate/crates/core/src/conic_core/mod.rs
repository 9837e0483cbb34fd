//! Conic martingales `Y = F(X)`: mappings, score drifts, mapped diffusion
//! coefficients, the autonomous mapping ODE and the Doléans-Φ map.

mod mapping;
mod ode;
mod simulate;

pub use mapping::Mapping;
pub use ode::{solve_mapping_ode, OdeOptions};
pub use simulate::{
    doleans_phi, driftless_residual, latent_drift, mapped_sigma, simulate_conic, simulate_conic_summaries,
    verify_driftless,
};
