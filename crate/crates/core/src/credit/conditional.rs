use super::SurvivalSurfaceParams;
use crate::error::ensure;
use crate::numerics::{find_root_bracketed, gauss_hermite, norm_cdf, norm_log_cdf};
use crate::{Error, Result};

fn check_times(t: f64, maturity: f64) -> Result<()> {
    ensure(t > 0.0 && maturity >= t, || format!("need maturity >= t > 0 (got t = {t}, T = {maturity})"))
}

/// `Q(t, T; z) = Φ(m(t,T) + √v(t) z) / Φ(m(t,t) + √v(t) z)`, the survival to
/// `T` given survival to `t` and the standardised factor `z`.
pub fn conditional_survival(p: &SurvivalSurfaceParams, t: f64, maturity: f64, z: f64) -> Result<f64> {
    check_times(t, maturity)?;
    if maturity == t {
        return Ok(1.0);
    }
    let sv = p.v(t).sqrt();
    let log_q = norm_log_cdf(p.m(t, maturity) + sv * z) - norm_log_cdf(p.m(t, t) + sv * z);
    Ok(log_q.exp().min(1.0))
}

/// `E[Q(t, T; Z)]` by `n_quad`-point Gauss–Hermite quadrature.
pub fn expected_conditional_survival(p: &SurvivalSurfaceParams, t: f64, maturity: f64, n_quad: usize) -> Result<f64> {
    check_times(t, maturity)?;
    let rule = gauss_hermite(n_quad)?;
    let mut acc = 0.0;
    for (z, w) in rule.iter() {
        acc += w * conditional_survival(p, t, maturity, z)?;
    }
    Ok(acc)
}

/// `E[Q(t, T; Z)] − S₀(T)/S₀(t)`; the two differ in general.
pub fn conditional_survival_gap(p: &SurvivalSurfaceParams, t: f64, maturity: f64, n_quad: usize) -> Result<f64> {
    let ratio = p.curve.survival(maturity) / p.curve.survival(t);
    Ok(expected_conditional_survival(p, t, maturity, n_quad)? - ratio)
}

/// Unique critical point `y₀ = ln(x)/m − m/2` of
/// `G̃(y) = xΦ(m + y) − Φ(y)`, `m = m(t,t) − m(t,T)`; `G̃` rises before it and
/// falls after it, which is why `G` has a single root.
pub fn q_cdf_turning_point(p: &SurvivalSurfaceParams, t: f64, maturity: f64, x: f64) -> f64 {
    let m = p.m(t, t) - p.m(t, maturity);
    x.ln() / m - 0.5 * m
}

/// `P{Q(t, T) ≤ x} = Φ(z*)`, `z*` the root of
/// `G(z) = xΦ(m(t,t) + √v z) − Φ(m(t,T) + √v z)`.
///
/// The root is found on `ln x + ln Φ(m(t,t) + √v z) − ln Φ(m(t,T) + √v z)`,
/// which has the same sign as `G` and stays representable in both tails.
pub fn q_cdf(p: &SurvivalSurfaceParams, t: f64, maturity: f64, x: f64) -> Result<f64> {
    check_times(t, maturity)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x >= 1.0 {
        return Ok(1.0);
    }
    let (s_t, s_mat) = (p.curve.survival(t), p.curve.survival(maturity));
    if p.eta == 0.0 {
        return Ok(if x >= s_mat / s_t { 1.0 } else { 0.0 });
    }
    if s_mat >= s_t {
        return Err(Error::Domain(format!("q_cdf needs S0(T) < S0(t) (got {s_mat} >= {s_t})")));
    }
    let (a, b, sv) = (p.m(t, t), p.m(t, maturity), p.v(t).sqrt());
    let lx = x.ln();
    // bracket in the factor value u = √v z so tiny v needs no special case
    let g = |u: f64| lx + norm_log_cdf(a + u) - norm_log_cdf(b + u);
    let (mut lo, mut hi) = (-10.0, 10.0);
    while g(lo) < 0.0 || g(hi) > 0.0 {
        if lo <= -1e5 {
            return Err(Error::Bracket { lo, hi, f_lo: g(lo), f_hi: g(hi) });
        }
        lo *= 2.0;
        hi *= 2.0;
    }
    let u = find_root_bracketed(g, lo, hi, 1e-12 * sv.min(1.0))?;
    Ok(norm_cdf(u / sv))
}
