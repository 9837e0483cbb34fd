use super::yor::log_theta;
use super::VerhulstParams;
use crate::error::ensure;
use crate::numerics::integrate_adaptive;
use crate::{Error, Result};
use std::f64::consts::PI;

/// `ln a_t(y, z)`, the log density of `A_t = ∫₀^t e^{2W_s} ds` at `z` given
/// `W_t = y`.
pub fn log_conditional_density_a(t: f64, y: f64, z: f64) -> Result<f64> {
    ensure(t > 0.0 && t.is_finite(), || format!("t must be positive, got {t}"))?;
    if !(z > 0.0) {
        return Err(Error::Domain(format!("z must be positive, got {z}")));
    }
    let lt = log_theta(y.exp() / z, t)?;
    Ok(0.5 * (2.0 * PI * t).ln() + y * y / (2.0 * t) - z.ln() - (1.0 + (2.0 * y).exp()) / (2.0 * z) + lt)
}

/// `a_t(y, z) = √t/(z φ(y/√t))·exp(−(1 + e^{2y})/2z)·θ_{e^y/z}(t)`.
pub fn conditional_density_a(t: f64, y: f64, z: f64) -> Result<f64> {
    Ok(log_conditional_density_a(t, y, z)?.exp())
}

/// Where the Gaussian weight on the terminal log-level is centred.
///
/// The latent level at scaled time `t′` is `ỹ = B_{t′} − t′`. `Origin`
/// weights `B_{t′} = ỹ + t′` by `N(0, t′)`; `Shifted` moves that weight to
/// `N(−t′, t′)`, the alternative reading kept for comparison against
/// simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Centering {
    #[default]
    Origin,
    Shifted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityOptions {
    pub rel_tol: f64,
    pub centering: Centering,
    /// Points of the coarse scan used to locate the support in `ln A`.
    pub scan_points: usize,
}

impl Default for DensityOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-9, centering: Centering::Origin, scan_points: 64 }
    }
}

/// Density of `X_t` on the paths that have not exploded by `t`, integrating
/// `a_{t′}(ỹ, A)·φ_{t′}(ỹ + t′)/(2x)` over the scaled integral `A`, with
/// `ỹ = ½ ln(x(1 − 2λX₀A)/X₀)` and `t′ = η²t/4`.
pub fn verhulst_density(p: &VerhulstParams, t: f64, x: f64) -> Result<f64> {
    verhulst_density_with(p, t, x, DensityOptions::default())
}

pub fn verhulst_density_with(p: &VerhulstParams, t: f64, x: f64, opts: DensityOptions) -> Result<f64> {
    ensure(t > 0.0 && t.is_finite(), || format!("t must be positive, got {t}"))?;
    ensure(x > 0.0 && x.is_finite(), || format!("x must be positive, got {x}"))?;
    let ts = 0.25 * p.eta * p.eta * t;
    let a_max = 1.0 / (2.0 * p.lambda * p.x0);
    let shift = match opts.centering {
        Centering::Origin => ts,
        Centering::Shifted => 2.0 * ts,
    };
    let log_integrand = |l: f64| -> Result<f64> {
        let a = l.exp();
        let rest = 1.0 - 2.0 * p.lambda * p.x0 * a;
        if !(rest > 0.0) {
            return Ok(f64::NEG_INFINITY);
        }
        let y = 0.5 * (x * rest / p.x0).ln();
        let w = y + shift;
        let gauss = -w * w / (2.0 * ts) - 0.5 * (2.0 * PI * ts).ln();
        Ok(log_conditional_density_a(ts, y, a)? + gauss + l - (2.0 * x).ln())
    };

    let hi = a_max.ln() + (-1e-12f64).ln_1p();
    let lo = ts.min(a_max).min(1.0).ln() - 8.0;
    let n = opts.scan_points.max(16);
    let step = (hi - lo) / n as f64;
    let scan: Vec<f64> = (0..=n).map(|i| log_integrand(lo + i as f64 * step)).collect::<Result<_>>()?;
    let (i_max, &coarse_peak) = scan.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty scan");
    if coarse_peak == f64::NEG_INFINITY {
        return Ok(0.0);
    }

    // March out from the best scan point with growing steps until the
    // integrand is 40 e-folds below the largest value seen.
    let centre = lo + i_max as f64 * step;
    let mut peak = coarse_peak;
    let mut ends = [centre; 2];
    for (side, dir) in [-1.0, 1.0].into_iter().enumerate() {
        let mut delta = step / 64.0;
        let mut l = centre;
        loop {
            l = (l + dir * delta).clamp(lo, hi);
            let v = log_integrand(l)?;
            peak = peak.max(v);
            if v < peak - 40.0 || l == lo || l == hi {
                break;
            }
            delta *= 1.3;
        }
        ends[side] = l;
    }

    let mut failure = None;
    let mut value = 0.0;
    for (a, b) in [(ends[0], centre), (centre, ends[1])] {
        let piece = integrate_adaptive(
            |l| match log_integrand(l) {
                Ok(v) => (v - peak).exp(),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            a,
            b,
            1e-300,
            opts.rel_tol,
            400,
        )?;
        value += piece.value;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(value * peak.exp())
}
