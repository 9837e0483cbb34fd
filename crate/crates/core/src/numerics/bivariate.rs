use super::normal::{norm_cdf, norm_pdf};
use super::quadrature::gauss_legendre;
use super::SQRT_2PI;
use crate::{Error, Result};
use std::f64::consts::PI;
use std::sync::OnceLock;

fn legendre20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

/// Standard bivariate normal CDF `Φ₂(x, y; ρ) = P(X ≤ x, Y ≤ y)`.
///
/// Drezner–Wesolowsky single-integral reduction with Genz's modifications:
/// 20-point Gauss–Legendre over `θ ∈ [0, asin ρ]` for `|ρ| ≤ 0.925`, and the
/// asymptotically corrected integrand in `√(1 − ρ²)` above that. The
/// independent and comonotone/antimonotone cases are closed form, as are
/// infinite limits.
pub fn bvn_cdf(x: f64, y: f64, rho: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!("correlation must lie in [-1, 1], got {rho}")));
    }
    if x.is_nan() || y.is_nan() {
        return Err(Error::Domain("bvn_cdf limits must not be NaN".into()));
    }
    if x == f64::NEG_INFINITY || y == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(norm_cdf(y));
    }
    if y == f64::INFINITY {
        return Ok(norm_cdf(x));
    }
    let (px, py) = (norm_cdf(x), norm_cdf(y));
    let value = if rho == 0.0 {
        px * py
    } else if rho == 1.0 {
        px.min(py)
    } else if rho == -1.0 {
        (px + py - 1.0).max(0.0)
    } else {
        upper_orthant(-x, -y, rho)
    };
    let lower = (px + py - 1.0).max(0.0);
    Ok(value.clamp(lower, px.min(py)))
}

/// `P(X > h, Y > k)` for correlation `r` strictly inside (−1, 1).
fn upper_orthant(h: f64, k: f64, r: f64) -> f64 {
    let (nodes, weights) = legendre20();
    if r.abs() <= 0.925 {
        let hk = h * k;
        let hs = 0.5 * (h * h + k * k);
        let asr = r.asin();
        let half = 0.5 * asr;
        let mut sum = 0.0;
        for (&t, &w) in nodes.iter().zip(weights) {
            let sn = (half * (t + 1.0)).sin();
            sum += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
        }
        return sum * half / (2.0 * PI) + norm_cdf(-h) * norm_cdf(-k);
    }

    let mut k = k;
    let mut hk = h * k;
    if r < 0.0 {
        k = -k;
        hk = -hk;
    }
    let a_sq = (1.0 - r) * (1.0 + r);
    let mut a = a_sq.sqrt();
    let b_sq = (h - k) * (h - k);
    let c = (4.0 - hk) / 8.0;
    let d = (12.0 - hk) / 16.0;
    let mut bvn = a
        * (-0.5 * (b_sq / a_sq + hk)).exp()
        * (1.0 - c * (b_sq - a_sq) * (1.0 - d * b_sq / 5.0) / 3.0 + c * d * a_sq * a_sq / 5.0);
    if hk > -160.0 {
        let b = b_sq.sqrt();
        bvn -= (-0.5 * hk).exp() * SQRT_2PI * norm_cdf(-b / a) * b * (1.0 - c * b_sq * (1.0 - d * b_sq / 5.0) / 3.0);
    }
    a *= 0.5;
    for (&t, &w) in nodes.iter().zip(weights) {
        let xs = (a * (t + 1.0)).powi(2);
        let rs = (1.0 - xs).sqrt();
        bvn += a
            * w
            * ((-b_sq / (2.0 * xs) - hk / (1.0 + rs)).exp() / rs
                - (-0.5 * (b_sq / xs + hk)).exp() * (1.0 + c * xs * (1.0 + d * xs)));
    }
    bvn = -bvn / (2.0 * PI);

    if r > 0.0 {
        bvn + norm_cdf(-h.max(k))
    } else {
        let mut v = -bvn;
        if k > h {
            v += if h < 0.0 { norm_cdf(k) - norm_cdf(h) } else { norm_cdf(-h) - norm_cdf(-k) };
        }
        v
    }
}

/// Partial derivative and density of Φ₂:
/// `h = ∂Φ₂/∂x = φ(x)Φ((y − ρx)/√(1 − ρ²))` and
/// `g = ∂²Φ₂/∂x∂y = φ(x)φ((y − ρx)/√(1 − ρ²))/√(1 − ρ²)`, symmetric in (x, y).
pub fn bvn_partials(x: f64, y: f64, rho: f64) -> Result<(f64, f64)> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!("correlation must lie in [-1, 1], got {rho}")));
    }
    if rho.abs() == 1.0 {
        return Err(Error::DegenerateCorrelation);
    }
    let s = ((1.0 - rho) * (1.0 + rho)).sqrt();
    let u = (y - rho * x) / s;
    let px = norm_pdf(x);
    Ok((px * norm_cdf(u), px * norm_pdf(u) / s))
}
