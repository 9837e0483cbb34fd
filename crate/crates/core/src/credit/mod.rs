//! Stochastic survival probabilities: the survival surface `S_t(T)`, the
//! Azéma supermartingale, conditional survival and the bivariate
//! Gaussian-copula survival martingale.

mod bivariate;
mod conditional;
mod curve;
mod surface;

pub use bivariate::{
    bivariate_azema_coefficients, bivariate_surface, copula_correlation, simulate_bivariate, BivariateParams,
    BivariatePaths, Maturities,
};
pub use conditional::{
    conditional_survival, conditional_survival_gap, expected_conditional_survival, q_cdf, q_cdf_turning_point,
};
pub use curve::SurvivalCurve;
pub use surface::{
    azema_coefficients, azema_paths, azema_strong_error, simulate_surface, surface_density, write_surface_csv,
    write_surface_summary, StrongErrorLevel, SurvivalSurfaceParams,
};

#[cfg(test)]
mod tests;
