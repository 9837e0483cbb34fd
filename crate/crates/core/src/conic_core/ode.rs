use super::mapping::{Mapping, Table};
use crate::{Error, Result};
use std::sync::Arc;

/// Controls for [`solve_mapping_ode`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    /// Interval on which `h > 0`, with `h` vanishing at finite endpoints.
    pub image: (f64, f64),
    /// Integration stops once the solution is within `eps` of an endpoint.
    pub eps: f64,
    pub step: f64,
    /// Largest distance from `x_ref` covered on either side.
    pub max_half_width: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { image: (0.0, 1.0), eps: 1e-9, step: 1e-3, max_half_width: 60.0 }
    }
}

/// Builds the mapping solving `dy/dx = h(y)`, `F(x_ref) = y_ref`, by
/// fixed-step RK4 outward from the reference point.
pub fn solve_mapping_ode<H>(h: H, x_ref: f64, y_ref: f64, opts: OdeOptions) -> Result<Mapping>
where
    H: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let (a, b) = opts.image;
    if !(y_ref > a && y_ref < b) {
        return Err(Error::Domain(format!("y_ref = {y_ref} must lie inside ({a}, {b})")));
    }
    if !(opts.step > 0.0 && opts.eps > 0.0 && opts.max_half_width > 0.0) {
        return Err(Error::Domain("step, eps and max_half_width must be positive".into()));
    }
    if a.is_finite() && b.is_finite() {
        for i in 1..1000 {
            let y = a + opts.eps + (b - a - 2.0 * opts.eps) * i as f64 / 1000.0;
            let v = h(y);
            if !(v > 0.0) {
                return Err(Error::Domain(format!("h({y}) = {v} is not positive inside the image")));
            }
        }
    }
    let h = Arc::new(h);
    let slope = |y: f64| -> Result<f64> {
        let v = h(y);
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else if y - a <= opts.eps || b - y <= opts.eps {
            Ok(v.max(0.0))
        } else {
            Err(Error::Domain(format!("h({y}) = {v} is not positive inside the image")))
        }
    };
    let max_steps = (opts.max_half_width / opts.step).ceil() as usize;
    let march = |dir: f64| -> Result<Vec<f64>> {
        let dx = dir * opts.step;
        let mut ys = vec![y_ref];
        let mut y = y_ref;
        for _ in 0..max_steps {
            if y - a <= opts.eps || b - y <= opts.eps {
                break;
            }
            let k1 = slope(y)?;
            let k2 = slope(y + 0.5 * dx * k1)?;
            let k3 = slope(y + 0.5 * dx * k2)?;
            let k4 = slope(y + dx * k3)?;
            let next = y + dx / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if !next.is_finite() {
                return Err(Error::Numeric(format!("ODE solution diverged near y = {y}")));
            }
            y = next.clamp(a, b);
            ys.push(y);
        }
        Ok(ys)
    };
    let left = march(-1.0)?;
    let right = march(1.0)?;
    let x0 = x_ref - opts.step * (left.len() - 1) as f64;
    let mut y: Vec<f64> = left.into_iter().rev().collect();
    y.extend_from_slice(&right[1..]);
    let dy = y.iter().map(|&v| h(v).max(0.0)).collect();
    let table = Table { x0, step: opts.step, y, dy, h };
    Ok(Mapping::tabulated(table, opts.image))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sup_diff(m: &Mapping, exact: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
        (0..=4000).map(|i| lo + (hi - lo) * i as f64 / 4000.0).map(|x| (m.value(x) - exact(x)).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn recovers_logistic() {
        let m = solve_mapping_ode(|y| y * (1.0 - y), 0.0, 0.5, OdeOptions::default()).unwrap();
        let exact = Mapping::logistic(1.0).unwrap();
        assert!(sup_diff(&m, |x| exact.value(x), -6.0, 6.0) < 1e-8);
        let (lo, hi) = m.domain();
        assert!(lo < -20.0 && hi > 20.0);
        for x in [-3.0, 0.1, 2.0] {
            assert!((m.density(x) - m.value(x) * (1.0 - m.value(x))).abs() < 1e-8);
            assert!((m.score(x) - (0.5 * x).tanh()).abs() < 1e-6);
            assert!((m.value(m.inverse(m.value(x)).unwrap()) - m.value(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn recovers_tanh_half() {
        let opts = OdeOptions { image: (-1.0, 1.0), ..Default::default() };
        let m = solve_mapping_ode(|y| 0.5 * (1.0 - y * y), 0.0, 0.0, opts).unwrap();
        assert!(sup_diff(&m, |x| (0.5 * x).tanh(), -6.0, 6.0) < 1e-8);
    }

    #[test]
    fn recovers_exponential() {
        let opts = OdeOptions { image: (0.0, f64::INFINITY), max_half_width: 4.0, ..Default::default() };
        let m = solve_mapping_ode(|y| y, 0.0, 1.0, opts).unwrap();
        assert!(sup_diff(&m, f64::exp, -3.0, 3.0) < 1e-8);
    }

    #[test]
    fn rejects_non_positive_slope() {
        let e = solve_mapping_ode(|y| y - 0.3, 0.0, 0.5, OdeOptions::default()).unwrap_err();
        assert!(matches!(e, Error::Domain(_)));
        assert!(solve_mapping_ode(|y| y, 0.0, 2.0, OdeOptions::default()).is_err());
    }
}
