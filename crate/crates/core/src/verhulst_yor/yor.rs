use crate::error::ensure;
use crate::numerics::{find_root_bracketed, integrate_adaptive, integrate_tanh_sinh};
use crate::{Error, Result};
use std::f64::consts::PI;

const PSI_TOL: f64 = 1e-12;
/// `ln(1e16)`: the Gaussian factor of the Ψ integrand is below 1e−16 past
/// `y = √(2u·ln 1e16)`.
const LN_ENVELOPE: f64 = 36.841_361_487_904_734;

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Integrand of Ψ: `e^{−y²/2u} e^{−r cosh y} sinh y sin(πy/u)`.
pub fn psi_integrand(r: f64, u: f64, y: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    (-y * y / (2.0 * u) - r * y.cosh()).exp() * y.sinh() * (PI * y / u).sin()
}

/// `Ψ_r(u) = ∫₀^∞ e^{−y²/2u} e^{−r cosh y} sinh(y) sin(πy/u) dy`.
pub fn psi_integral(r: f64, u: f64) -> Result<f64> {
    psi_integral_with_tol(r, u, PSI_TOL)
}

/// [`psi_integral`] with an explicit relative tolerance per lobe.
///
/// The integrand is split at the zeros `k·u` of `sin(πy/u)`, each lobe is
/// integrated adaptively and the alternating lobes are summed with
/// compensation.
pub fn psi_integral_with_tol(r: f64, u: f64, rel_tol: f64) -> Result<f64> {
    ensure(r > 0.0 && r.is_finite(), || format!("r must be positive, got {r}"))?;
    ensure(u > 0.0 && u.is_finite(), || format!("u must be positive, got {u}"))?;
    let y_max = (2.0 * u * LN_ENVELOPE).sqrt();
    let n_lobes = (y_max / u).ceil() as usize;
    let mut total = CompensatedSum::default();
    let mut error = 0.0;
    for k in 0..n_lobes {
        let (a, b) = (k as f64 * u, ((k + 1) as f64 * u).min(y_max));
        let lobe = integrate_adaptive(|y| psi_integrand(r, u, y), a, b, 1e-300, rel_tol, 200).map_err(|e| match e {
            Error::Accuracy { estimate, error: err } => Error::Accuracy { estimate: total.value() + estimate, error: error + err },
            other => other,
        })?;
        total.add(lobe.value);
        error += lobe.error;
    }
    Ok(total.value())
}

/// `θ_r(u) = r/√(2π³u)·e^{π²/2u}·Ψ_r(u)` evaluated literally.
///
/// The exponential prefactor multiplies a heavily cancelled integral, so this
/// loses all accuracy once `u` drops much below 1. [`log_theta`] is the
/// stable route; this one is kept as a cross-check.
pub fn theta_density_direct(r: f64, u: f64) -> Result<f64> {
    let psi = psi_integral(r, u)?;
    Ok(r / (2.0 * PI.powi(3) * u).sqrt() * (PI * PI / (2.0 * u)).exp() * psi)
}

/// `θ_r(u)`, so that `P(A_t ∈ dz | W_t = y) ∝ e^{−(1+e^{2y})/2z} θ_{e^y/z}(t)`.
pub fn theta_density(r: f64, u: f64) -> Result<f64> {
    Ok(log_theta(r, u)?.exp())
}

/// `ln(sinh a / a)`, accurate for small and large `a`.
fn log_sinhc(a: f64) -> f64 {
    if a < 0.5 {
        let x = a * a;
        let excess = x / 6.0 * (1.0 + x / 20.0 * (1.0 + x / 42.0 * (1.0 + x / 72.0 * (1.0 + x / 110.0 * (1.0 + x / 156.0)))));
        excess.ln_1p()
    } else if a > 20.0 {
        a - std::f64::consts::LN_2 - a.ln()
    } else {
        (a.sinh() / a).ln()
    }
}

/// `a cosh a − sinh a`, with the cancellation near 0 removed.
fn cosh_minus_sinhc(a: f64) -> f64 {
    if a < 0.5 {
        let x = a * a;
        a * x * (1.0 / 3.0 + x * (1.0 / 30.0 + x * (1.0 / 840.0 + x * (1.0 / 45_360.0 + x / 3_991_680.0))))
    } else {
        a * a.cosh() - a.sinh()
    }
}

/// `L(β) = ln(β/sin β)` and `L′(β)`, series near 0.
fn log_ratio(beta: f64) -> (f64, f64) {
    if beta < 1e-4 {
        let b2 = beta * beta;
        (b2 / 6.0 + b2 * b2 / 180.0, beta / 3.0 + beta * b2 / 45.0)
    } else {
        (beta.ln() - beta.sin().ln(), 1.0 / beta - 1.0 / beta.tan())
    }
}

/// Start of the contour: `β_s = 0` when `ru ≤ 1`, else the root of
/// `sin β/β = 1/(ru)`.
struct Contour {
    r: f64,
    u: f64,
    beta_s: f64,
    /// `L(β_s) = ln(ru)` and the next three derivatives of `L` at `β_s`.
    taylor: [f64; 4],
}

impl Contour {
    fn new(r: f64, u: f64) -> Result<Self> {
        let ru = r * u;
        let beta_s = if ru <= 1.0 { 0.0 } else { find_root_bracketed(|b| log_ratio(b).0 - ru.ln(), 0.0, PI * (1.0 - 1e-16), 1e-15)? };
        let taylor = if beta_s > 0.0 {
            let (s, c) = beta_s.sin_cos();
            let b = beta_s;
            [ru.ln(), 1.0 / b - c / s, 1.0 / (s * s) - 1.0 / (b * b), 2.0 / (b * b * b) - 2.0 * c / (s * s * s)]
        } else {
            [0.0; 4]
        };
        Ok(Self { r, u, beta_s, taylor })
    }

    /// `ln(sinh a/a)` target at `β = β_s + d`, formed without cancelling
    /// against `ln(ru)` near the start.
    fn target(&self, d: f64) -> (f64, f64) {
        let beta = self.beta_s + d;
        let (l, dl) = log_ratio(beta);
        if self.beta_s > 0.0 && d < 1e-5 {
            let [_, l1, l2, l3] = self.taylor;
            (d * (l1 + d * (0.5 * l2 + d * l3 / 6.0)), dl)
        } else {
            (l - (self.r * self.u).ln(), dl)
        }
    }

    /// `a(β)` solving `sinh a/a = e^{target}`: safeguarded Newton.
    fn solve_a(ln_target: f64) -> Result<f64> {
        if ln_target < 1e-6 {
            return Ok((6.0 * ln_target * (1.0 + ln_target / 5.0)).sqrt());
        }
        let (mut lo, mut hi) = (0.0, 1.0f64.max(ln_target + 2.0));
        while log_sinhc(hi) < ln_target {
            hi *= 2.0;
        }
        let mut a = if ln_target < 1.0 {
            (6.0 * ln_target).sqrt()
        } else {
            ln_target + (2.0 * ln_target + 2.0).ln()
        }
        .clamp(lo, hi);
        for _ in 0..100 {
            let g = log_sinhc(a) - ln_target;
            if g > 0.0 {
                hi = a;
            } else {
                lo = a;
            }
            let slope = if a > 20.0 { 1.0 - 1.0 / a } else { cosh_minus_sinhc(a) / (a * a.sinh()) };
            let mut next = a - g / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - a).abs() <= 1e-14 * a {
                return Ok(next);
            }
            a = next;
        }
        Err(Error::Numeric(format!("contour radius did not converge for target {ln_target}")))
    }

    /// Contour integrand at `β = β_s + d`, scaled by `e^{−peak}`.
    fn integrand(&self, d: f64, peak: f64) -> Result<f64> {
        let (r, u) = (self.r, self.u);
        let beta = self.beta_s + d;
        let (ln_target, dl) = self.target(d);
        if !(ln_target > 0.0) {
            return Ok(0.0);
        }
        let a = Self::solve_a(ln_target)?;
        if a > 700.0 {
            return Ok(0.0);
        }
        let re_phase = r * a.cosh() * beta.cos() - (a * a - beta * beta) / (2.0 * u);
        // R = e^{L}/ru, so R′ = L′·sinh a/a.
        let da = dl * a.sinh() * a / cosh_minus_sinhc(a);
        Ok((re_phase - peak).exp() * (da * a.cosh() * beta.sin() + a.sinh() * beta.cos()))
    }

    /// `Re Φ` at the start of the contour.
    fn peak(&self) -> Result<f64> {
        let (r, u) = (self.r, self.u);
        if self.beta_s > 0.0 {
            Ok(r * self.beta_s.cos() + self.beta_s * self.beta_s / (2.0 * u))
        } else {
            let a0 = Self::solve_a(-(r * u).ln())?;
            Ok(r * a0.cosh() - a0 * a0 / (2.0 * u))
        }
    }
}

/// `ln θ_r(u)` by deforming the defining integral onto its steepest-descent
/// contour, which removes the `e^{π²/2u}` cancellation.
///
/// With `Φ(p) = r cosh p − p²/2u`, the contour `p = a(β) + iβ` keeps
/// `sinh a/a = β/(ru·sin β)`, starts at the real saddle (or at `β = 0`
/// when `ru ≤ 1`) and ends at `β = π`; along it
/// `θ = r/√(2π³u)·∫ e^{Re Φ}(a′ cosh a sin β + sinh a cos β) dβ`.
pub fn log_theta(r: f64, u: f64) -> Result<f64> {
    ensure(r > 0.0 && r.is_finite(), || format!("r must be positive, got {r}"))?;
    ensure(u > 0.0 && u.is_finite(), || format!("u must be positive, got {u}"))?;
    let contour = Contour::new(r, u)?;
    let peak = contour.peak()?;
    let mut failure = None;
    let integral = integrate_tanh_sinh(
        |d| {
            contour.integrand(d, peak).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                0.0
            })
        },
        0.0,
        PI - contour.beta_s,
        // Successive levels double the correct digits, so a 1e−6 agreement
        // between them leaves the finer estimate near machine precision.
        1e-6,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    ensure(integral.value > 0.0, || format!("non-positive contour integral at r={r}, u={u}"))?;
    Ok(r.ln() - (2.0 * PI.powi(3) * u).sqrt().ln() + peak + integral.value.ln())
}
