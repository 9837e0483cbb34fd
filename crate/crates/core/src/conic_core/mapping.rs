use crate::error::ensure;
use crate::numerics::{find_root_bracketed, norm_cdf, norm_inv_cdf, norm_pdf, norm_sf};
use crate::{Error, Result};
use std::io::Write;
use std::sync::Arc;

/// A smooth strictly monotone map `F` from the latent line onto a bounded
/// (or half-bounded) image.
///
/// Every mapping is held in increasing orientation. A decreasing `F` such as
/// `e^{-λx}` is stored as `x̃ ↦ F(-x̃)` with `orientation() == -1`, and all
/// methods take the latent coordinate `x̃`. Convert with [`Mapping::to_latent`].
#[derive(Debug, Clone)]
pub struct Mapping {
    kind: Kind,
    domain: (f64, f64),
    image: (f64, f64),
    orientation: f64,
}

#[derive(Debug, Clone)]
enum Kind {
    Logistic { ln_c: f64 },
    TanhHalf,
    ExpNeg { lambda: f64 },
    Phi,
    Bimodal { x0: f64, mu: f64, s: f64 },
    Tabulated(Arc<Table>),
}

/// Cubic-Hermite interpolant of an ODE solution on a uniform grid.
pub(crate) struct Table {
    pub x0: f64,
    pub step: f64,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
    pub h: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for Table {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Table").field("x0", &self.x0).field("step", &self.step).field("len", &self.y.len()).finish()
    }
}

impl Table {
    fn x_max(&self) -> f64 {
        self.x0 + self.step * (self.y.len() - 1) as f64
    }

    /// Segment index and local coordinate in [0, 1].
    fn locate(&self, x: f64) -> (usize, f64) {
        let pos = (x - self.x0) / self.step;
        let i = (pos.floor() as usize).min(self.y.len() - 2);
        (i, pos - i as f64)
    }

    fn value(&self, x: f64) -> f64 {
        if x <= self.x0 {
            return self.y[0];
        }
        if x >= self.x_max() {
            return *self.y.last().unwrap();
        }
        let (i, s) = self.locate(x);
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.dy[i] * self.step, self.dy[i + 1] * self.step);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * d0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * d1
    }

    fn derivative(&self, x: f64) -> f64 {
        if x <= self.x0 || x >= self.x_max() {
            return 0.0;
        }
        (self.h)(self.value(x))
    }

    fn h_prime(&self, y: f64) -> f64 {
        let d = 1e-6 * y.abs().max(1e-3);
        ((self.h)(y + d) - (self.h)(y - d)) / (2.0 * d)
    }
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Mapping {
    /// `F(x) = c·e^x / (1 + c·e^x)`, image (0, 1).
    pub fn logistic(c: f64) -> Result<Self> {
        ensure(c > 0.0 && c.is_finite(), || format!("logistic mapping needs c > 0 (got {c})"))?;
        Ok(Self::increasing(Kind::Logistic { ln_c: c.ln() }, (f64::NEG_INFINITY, f64::INFINITY), (0.0, 1.0)))
    }

    /// `F(x) = tanh(x/2)`, image (-1, 1).
    pub fn tanh_half() -> Self {
        Self::increasing(Kind::TanhHalf, (f64::NEG_INFINITY, f64::INFINITY), (-1.0, 1.0))
    }

    /// `F(x) = e^{-λx}` on x > 0, image (0, 1). Stored as `e^{λx̃}` on x̃ < 0.
    pub fn exp_neg(lambda: f64) -> Result<Self> {
        ensure(lambda > 0.0 && lambda.is_finite(), || format!("exponential mapping needs lambda > 0 (got {lambda})"))?;
        Ok(Self { kind: Kind::ExpNeg { lambda }, domain: (f64::NEG_INFINITY, 0.0), image: (0.0, 1.0), orientation: -1.0 })
    }

    /// `F = Φ`, score `ψ(x) = x`.
    pub fn phi() -> Self {
        Self::increasing(Kind::Phi, (f64::NEG_INFINITY, f64::INFINITY), (0.0, 1.0))
    }

    /// Equal mixture of `Φ((x - x0 ∓ μ)/s)`.
    pub fn bimodal(x0: f64, mu: f64, s: f64) -> Result<Self> {
        ensure(mu > 0.0 && s > 0.0 && x0.is_finite(), || format!("bimodal mapping needs mu, s > 0 (got {mu}, {s})"))?;
        Ok(Self::increasing(Kind::Bimodal { x0, mu, s }, (f64::NEG_INFINITY, f64::INFINITY), (0.0, 1.0)))
    }

    pub(crate) fn tabulated(table: Table, image: (f64, f64)) -> Self {
        let domain = (table.x0, table.x_max());
        Self::increasing(Kind::Tabulated(Arc::new(table)), domain, image)
    }

    fn increasing(kind: Kind, domain: (f64, f64), image: (f64, f64)) -> Self {
        Self { kind, domain, image, orientation: 1.0 }
    }

    /// Latent-coordinate domain, in increasing orientation.
    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// The cone `[a, b]`.
    pub fn image(&self) -> (f64, f64) {
        self.image
    }

    /// `+1` for increasing mappings, `-1` when stored through `x̃ = -x`.
    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    /// Converts an original-orientation argument to the latent coordinate.
    pub fn to_latent(&self, x: f64) -> f64 {
        self.orientation * x
    }

    pub fn is_bimodal(&self) -> bool {
        matches!(self.kind, Kind::Bimodal { mu, s, .. } if mu > s)
    }

    /// `F(x̃)`.
    pub fn value(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Logistic { ln_c } => logistic(x + ln_c),
            Kind::TanhHalf => (0.5 * x).tanh(),
            Kind::ExpNeg { lambda } => (lambda * x.min(0.0)).exp(),
            Kind::Phi => norm_cdf(x),
            Kind::Bimodal { x0, mu, s } => 0.5 * (norm_cdf((x - x0 - mu) / s) + norm_cdf((x - x0 + mu) / s)),
            Kind::Tabulated(t) => t.value(x),
        }
    }

    /// `f = F′`, positive on the domain interior.
    pub fn density(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Logistic { ln_c } => {
                let z = x + ln_c;
                logistic(z) * logistic(-z)
            }
            Kind::TanhHalf => {
                let c = (0.5 * x).cosh();
                0.5 / (c * c)
            }
            Kind::ExpNeg { lambda } => {
                if x > 0.0 {
                    0.0
                } else {
                    lambda * (lambda * x).exp()
                }
            }
            Kind::Phi => norm_pdf(x),
            Kind::Bimodal { x0, mu, s } => 0.5 * (norm_pdf((x - x0 - mu) / s) + norm_pdf((x - x0 + mu) / s)) / s,
            Kind::Tabulated(t) => t.derivative(x),
        }
    }

    /// `f′`, from closed forms independent of [`Mapping::score`].
    pub fn density_derivative(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Logistic { ln_c } => {
                let z = x + ln_c;
                let (p, q) = (logistic(z), logistic(-z));
                p * q * (q - p)
            }
            Kind::TanhHalf => {
                let c = (0.5 * x).cosh();
                -0.5 * (0.5 * x).tanh() / (c * c)
            }
            Kind::ExpNeg { lambda } => lambda * self.density(x),
            Kind::Phi => -x * norm_pdf(x),
            Kind::Bimodal { x0, mu, s } => {
                let (u1, u2) = ((x - x0 - mu) / s, (x - x0 + mu) / s);
                -0.5 * (u1 * norm_pdf(u1) + u2 * norm_pdf(u2)) / (s * s)
            }
            Kind::Tabulated(t) => {
                let f = t.derivative(x);
                t.h_prime(t.value(x)) * f
            }
        }
    }

    /// Score `ψ = -f′/f` in the latent coordinate.
    pub fn score(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Logistic { ln_c } => (0.5 * (x + ln_c)).tanh(),
            Kind::TanhHalf => (0.5 * x).tanh(),
            Kind::ExpNeg { lambda } => -lambda,
            Kind::Phi => x,
            Kind::Bimodal { x0, mu, s } => {
                // u₁φ(u₁)+u₂φ(u₂) over s(φ(u₁)+φ(u₂)) as a softmax of the exponents
                let (u1, u2) = ((x - x0 - mu) / s, (x - x0 + mu) / s);
                let (e1, e2) = (-0.5 * u1 * u1, -0.5 * u2 * u2);
                let top = e1.max(e2);
                let (w1, w2) = ((e1 - top).exp(), (e2 - top).exp());
                (u1 * w1 + u2 * w2) / (s * (w1 + w2))
            }
            Kind::Tabulated(t) => -t.h_prime(t.value(x)),
        }
    }

    /// Score `-F″/F′` of the original, possibly decreasing, function.
    pub fn score_original(&self, x: f64) -> f64 {
        self.orientation * self.score(self.to_latent(x))
    }

    /// `F⁻¹(y)` in the latent coordinate; `y` must lie inside the image.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        let (a, b) = self.image;
        if !(y > a && y < b) {
            return Err(Error::Domain(format!("{y} is outside the open image ({a}, {b})")));
        }
        match &self.kind {
            Kind::Logistic { ln_c } => Ok((y / (1.0 - y)).ln() - ln_c),
            Kind::TanhHalf => Ok(2.0 * y.atanh()),
            Kind::ExpNeg { lambda } => Ok(y.ln() / lambda),
            Kind::Phi => norm_inv_cdf(y),
            Kind::Bimodal { x0, mu, s } => {
                // Φ(u₁) ≤ F ≤ Φ(u₂) brackets the root between the component quantiles
                let z = norm_inv_cdf(y)?;
                let (lo, hi) = (x0 - mu + s * z, x0 + mu + s * z);
                let g = |x: f64| {
                    if y < 0.5 {
                        self.value(x) - y
                    } else {
                        // upper tail in survival form keeps precision near 1
                        let (u1, u2) = ((x - x0 - mu) / s, (x - x0 + mu) / s);
                        (1.0 - y) - 0.5 * (norm_sf(u1) + norm_sf(u2))
                    }
                };
                find_root_bracketed(g, lo, hi, 1e-14)
            }
            Kind::Tabulated(t) => {
                let i = t.y.partition_point(|&v| v < y).clamp(1, t.y.len() - 1);
                let lo = t.x0 + t.step * (i - 1) as f64;
                find_root_bracketed(|x| t.value(x) - y, lo, lo + t.step, 1e-15)
            }
        }
    }

    /// Writes `x,F,f,psi` rows for the given latent points.
    pub fn write_tabulation<W: Write>(&self, xs: &[f64], mut w: W) -> Result<()> {
        use crate::sde_engine::fmt17;
        writeln!(w, "x,F,f,psi")?;
        for &x in xs {
            writeln!(w, "{},{},{},{}", fmt17(x), fmt17(self.value(x)), fmt17(self.density(x)), fmt17(self.score(x)))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
    }

    fn check_consistency(m: &Mapping, xs: &[f64]) {
        for &x in xs {
            let y = m.value(x);
            let (a, b) = m.image();
            if y > a + 1e-12 && y < b - 1e-12 {
                let back = m.inverse(y).unwrap();
                assert!((m.value(back) - y).abs() < 1e-9, "x={x}");
            }
            let h = 1e-4;
            let fd = (m.value(x + h) - m.value(x - h)) / (2.0 * h);
            let f = m.density(x);
            assert!(f > 0.0);
            assert!((fd - f).abs() <= 1e-6 * f.max(1e-300) + 1e-12, "x={x}: {fd} vs {f}");
            let fd2 = (m.density(x + h) - m.density(x - h)) / (2.0 * h);
            assert!((fd2 - m.density_derivative(x)).abs() < 1e-7 * (1.0 + fd2.abs()));
            assert!((m.score(x) + m.density_derivative(x) / f).abs() < 1e-9 * (1.0 + m.score(x).abs()));
        }
    }

    #[test]
    fn logistic() {
        let m = Mapping::logistic(1.0).unwrap();
        assert_eq!(m.value(0.0), 0.5);
        assert_eq!(m.score(0.0), 0.0);
        for x in grid(-10.0, 10.0, 200) {
            assert!((m.score(x) - (0.5 * x).tanh()).abs() < 1e-12);
            let f = m.value(x);
            assert!((m.density(x) - f * (1.0 - f)).abs() < 1e-12);
        }
        let c = Mapping::logistic(3.0).unwrap();
        assert!((c.value(0.0) - 0.75).abs() < 1e-15);
        check_consistency(&c, &grid(-8.0, 8.0, 50));
        assert!(matches!(Mapping::logistic(0.0), Err(Error::Domain(_))));
        assert!(Mapping::logistic(-1.0).is_err());
    }

    #[test]
    fn tanh_half() {
        let m = Mapping::tanh_half();
        let l = Mapping::logistic(1.0).unwrap();
        assert_eq!(m.value(0.0), 0.0);
        for x in grid(-10.0, 10.0, 100) {
            assert!((m.score(x) - l.score(x)).abs() < 1e-12);
        }
        for y in grid(-0.99, 0.99, 99) {
            assert!((m.density(m.inverse(y).unwrap()) - 0.5 * (1.0 - y * y)).abs() < 1e-10);
        }
        check_consistency(&m, &grid(-8.0, 8.0, 40));
    }

    #[test]
    fn exp_neg() {
        let m = Mapping::exp_neg(2.0).unwrap();
        assert_eq!(m.orientation(), -1.0);
        assert_eq!(m.value(m.to_latent(0.0)), 1.0);
        let x = 0.7;
        assert!((m.value(m.to_latent(x)) - (-1.4f64).exp()).abs() < 1e-15);
        assert_eq!(m.score_original(x), 2.0);
        // finite-difference check of ψ = -F″/F′ on the original function
        let f = |x: f64| (-2.0 * x).exp();
        let h = 1e-4;
        let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
        let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        assert!((-d2 / d1 - 2.0).abs() < 1e-6);
        check_consistency(&m, &grid(-5.0, -0.1, 20));
    }

    #[test]
    fn phi() {
        let m = Mapping::phi();
        assert_eq!(m.score(2.0), 2.0);
        assert_eq!(m.inverse(0.5).unwrap(), 0.0);
        for y in grid(0.01, 0.49, 48) {
            let h = |y: f64| m.density(m.inverse(y).unwrap());
            assert!((h(y) - h(1.0 - y)).abs() < 1e-12);
        }
        check_consistency(&m, &grid(-4.0, 4.0, 60));
    }

    #[test]
    fn bimodal() {
        let (x0, s) = (0.4, 0.5);
        let m = Mapping::bimodal(x0, 3.0 * s, s).unwrap();
        assert!(m.is_bimodal());
        assert!(!Mapping::bimodal(x0, 0.5 * s, s).unwrap().is_bimodal());
        assert!((m.value(x0) - 0.5).abs() < 1e-15);
        assert!(m.score(x0).abs() < 1e-15);
        // local maxima of f at x0 ± μ by a fine grid search
        let xs = grid(x0 - 4.0, x0 + 4.0, 8000);
        let f: Vec<f64> = xs.iter().map(|&x| m.density(x)).collect();
        let peaks: Vec<f64> = (1..xs.len() - 1).filter(|&i| f[i] > f[i - 1] && f[i] > f[i + 1]).map(|i| xs[i]).collect();
        assert_eq!(peaks.len(), 2);
        assert!((peaks[0] - (x0 - 1.5)).abs() < 2e-3 && (peaks[1] - (x0 + 1.5)).abs() < 2e-3);
        check_consistency(&m, &grid(-3.0, 3.0, 60));
    }

    #[test]
    fn inverse_rejects_boundary() {
        let m = Mapping::phi();
        assert!(m.inverse(0.0).is_err());
        assert!(m.inverse(1.0).is_err());
        assert!(Mapping::tanh_half().inverse(-1.0).is_err());
    }

    #[test]
    fn tabulation_csv() {
        let mut buf = Vec::new();
        Mapping::phi().write_tabulation(&[-1.0, 0.0, 1.0], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,F,f,psi");
        let mid: Vec<f64> = lines[2].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(mid, vec![0.0, 0.5, norm_pdf(0.0), 0.0]);
    }
}
