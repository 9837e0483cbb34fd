//! Closed-form statistics of the Φ-martingale `Y = Φ(X)`, whose latent `X`
//! is the Vasicek-type diffusion `dX = (η²/2) X dt + η dW`, and of the
//! exponential martingale used as its unbounded comparison.

use crate::error::ensure;
use crate::numerics::{bvn_cdf, norm_cdf, norm_inv_cdf};
use crate::sde_engine::fmt17;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiMartingaleParams {
    pub y0: f64,
    pub eta: f64,
}

impl PhiMartingaleParams {
    pub fn new(y0: f64, eta: f64) -> Result<Self> {
        ensure(y0 > 0.0 && y0 < 1.0, || format!("y0 must lie in (0, 1) (got {y0})"))?;
        ensure(eta >= 0.0 && eta.is_finite(), || format!("eta must be finite and >= 0 (got {eta})"))?;
        Ok(Self { y0, eta })
    }

    /// `X₀ = Φ⁻¹(y0)`.
    pub fn x0(&self) -> f64 {
        norm_inv_cdf(self.y0).expect("y0 validated in (0, 1)")
    }

    fn v(&self, t: f64) -> f64 {
        self.eta * self.eta * t
    }
}

/// Mean and standard deviation of `X_t`: `(x0·e^{η²t/2}, √(e^{η²t} − 1))`.
pub fn phi_mean_std(p: &PhiMartingaleParams, t: f64) -> (f64, f64) {
    let v = p.v(t);
    (p.x0() * (0.5 * v).exp(), v.exp_m1().sqrt())
}

/// `(m/s, 1/s)`, finite for every `t > 0` even when `e^{η²t}` overflows.
fn standardised(p: &PhiMartingaleParams, t: f64) -> Option<(f64, f64)> {
    let v = p.v(t);
    if v <= 0.0 {
        return None;
    }
    let root = (-(-v).exp_m1()).sqrt();
    Some((p.x0() / root, (-0.5 * v).exp() / root))
}

/// `P{Y_t ≤ y} = Φ((Φ⁻¹(y) − m)/s)`. A point mass at `y0` when `s = 0`.
pub fn phi_cdf(p: &PhiMartingaleParams, t: f64, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    match standardised(p, t) {
        None => {
            if y >= p.y0 {
                1.0
            } else {
                0.0
            }
        }
        Some((m_over_s, inv_s)) => norm_cdf(norm_inv_cdf(y).expect("y in (0, 1)") * inv_s - m_over_s),
    }
}

/// `E[Y_t²] = Φ₂(x0, x0; 1 − e^{−η²t})`.
pub fn phi_second_moment(p: &PhiMartingaleParams, t: f64) -> f64 {
    const MAX_RHO: f64 = 1.0 - 1e-16;
    let rho = (-(-p.v(t)).exp_m1()).clamp(0.0, MAX_RHO);
    let x0 = p.x0();
    bvn_cdf(x0, x0, rho).expect("arguments validated")
}

/// `Var[Y_t] = E[Y_t²] − y0²`.
pub fn phi_variance(p: &PhiMartingaleParams, t: f64) -> f64 {
    (phi_second_moment(p, t) - p.y0 * p.y0).max(0.0)
}

/// `Var[Y_{t+δ} − Y_t]`, the growth of the second moment over `[t, t+δ]`.
pub fn phi_increment_variance(p: &PhiMartingaleParams, t: f64, delta: f64) -> f64 {
    if delta <= 0.0 {
        return 0.0;
    }
    (phi_second_moment(p, t + delta) - phi_second_moment(p, t)).max(0.0)
}

/// `q(t, prob) = Φ(m + s·Φ⁻¹(prob))`.
pub fn phi_quantile(p: &PhiMartingaleParams, t: f64, prob: f64) -> Result<f64> {
    let z = norm_inv_cdf(prob)?;
    Ok(match standardised(p, t) {
        None => p.y0,
        Some((m_over_s, inv_s)) => {
            let w = m_over_s + z;
            if w == 0.0 {
                0.5
            } else {
                norm_cdf(w / inv_s)
            }
        }
    })
}

/// Parameter of the Bernoulli limit of `Y_t` as `t → ∞`: `P{Y_∞ = 1} = y0`.
pub fn phi_asymptotic_law(p: &PhiMartingaleParams) -> f64 {
    p.y0
}

/// Quantile `m0·exp(η√t Φ⁻¹(prob) − η²t/2)` of the exponential martingale at
/// `t`, and the variance of its increment over `[s, t]`,
/// `m0²·e^{η²s}(e^{η²(t−s)} − 1)`.
pub fn exp_martingale_stats(m0: f64, eta: f64, s: f64, t: f64, prob: f64) -> Result<(f64, f64)> {
    ensure(m0 > 0.0 && eta >= 0.0, || format!("need m0 > 0 and eta >= 0 (got {m0}, {eta})"))?;
    ensure(0.0 <= s && s <= t, || format!("need 0 <= s <= t (got s = {s}, t = {t})"))?;
    let z = norm_inv_cdf(prob)?;
    let q = m0 * (eta * t.sqrt() * z - 0.5 * eta * eta * t).exp();
    let var = m0 * m0 * (eta * eta * s).exp() * (eta * eta * (t - s)).exp_m1();
    Ok((q, var))
}

/// Probabilities 5%, 10%, …, 95% of the quantile fans.
pub fn fan_probabilities() -> Vec<f64> {
    (1..=19).map(|k| k as f64 * 0.05).collect()
}

fn fan_header(probs: &[f64]) -> String {
    let mut h = String::from("t");
    for p in probs {
        h.push_str(&format!(",p_{:02}", (p * 100.0).round() as i64));
    }
    h
}

/// Φ-martingale quantile fan: `t,p_05,...,p_95,p_star`, where `p_star` is
/// the `(1 − y0)`-quantile.
pub fn write_phi_quantile_fan<W: Write>(p: &PhiMartingaleParams, times: &[f64], mut w: W) -> Result<()> {
    let probs = fan_probabilities();
    writeln!(w, "{},p_star", fan_header(&probs))?;
    for &t in times {
        write!(w, "{}", fmt17(t))?;
        for &q in probs.iter().chain(std::iter::once(&(1.0 - p.y0))) {
            write!(w, ",{}", fmt17(phi_quantile(p, t, q)?))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Exponential-martingale quantile fan `t,p_05,...,p_95` started at `m0`.
pub fn write_exp_quantile_fan<W: Write>(m0: f64, eta: f64, times: &[f64], mut w: W) -> Result<()> {
    let probs = fan_probabilities();
    writeln!(w, "{}", fan_header(&probs))?;
    for &t in times {
        write!(w, "{}", fmt17(t))?;
        for &q in &probs {
            write!(w, ",{}", fmt17(exp_martingale_stats(m0, eta, t, t, q)?.0))?;
        }
        writeln!(w)?;
    }
    Ok(())
}
