//! Special functions, quadrature and root finding shared by every other
//! module. Everything here is pure and reentrant.

mod bivariate;
mod normal;
mod quadrature;
mod roots;

pub use bivariate::{bvn_cdf, bvn_partials};
pub use normal::{norm_cdf, norm_inv_cdf, norm_log_cdf, norm_pdf, norm_sf};
pub use quadrature::{
    gauss_hermite, gauss_legendre, integrate_adaptive, integrate_tanh_sinh, Integral,
    QuadratureRule,
};
pub use roots::{find_root_bracketed, DEFAULT_ROOT_TOL};

pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
