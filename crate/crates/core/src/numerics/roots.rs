use crate::{Error, Result};

pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

/// Brent's bracketed root finder: inverse quadratic / secant steps with a
/// bisection fallback, so convergence is guaranteed once a sign change is
/// bracketed. Returns when the bracket is narrower than `tol` or an exact
/// zero is hit.
pub fn find_root_bracketed(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("root tolerance must be positive, got {tol}")));
    }
    let eval = |f: &mut dyn FnMut(f64) -> f64, x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numeric(format!("non-finite function value {v} at {x}")))
        }
    };
    let (mut a, mut b) = (lo, hi);
    let mut fa = eval(&mut f, a)?;
    if fa == 0.0 {
        return Ok(a);
    }
    let mut fb = eval(&mut f, b)?;
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo, hi, f_lo: fa, f_hi: fb });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..500 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = eval(&mut f, b)?;
    }
    Err(Error::Numeric("root finder exceeded iteration budget".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_and_cubic() {
        let r = find_root_bracketed(|z| z - 1.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
        let tol = 1e-12;
        let r = find_root_bracketed(|z| z * z * z - 2.0, 0.0, 2.0, tol).unwrap();
        assert!((r - 2f64.cbrt()).abs() <= tol);
    }

    #[test]
    fn boundary_root_returned_immediately() {
        let mut calls = 0;
        let r = find_root_bracketed(
            |z| {
                calls += 1;
                z
            },
            0.0,
            3.0,
            1e-12,
        )
        .unwrap();
        assert_eq!(r, 0.0);
        assert_eq!(calls, 1);
    }

    #[test]
    fn errors() {
        assert!(matches!(find_root_bracketed(|z| z * z + 1.0, -1.0, 1.0, 1e-12), Err(Error::Bracket { .. })));
        assert!(matches!(
            find_root_bracketed(|z| if z > 0.5 { f64::NAN } else { z - 1.0 }, 0.0, 2.0, 1e-12),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn steep_function_converges() {
        let r = find_root_bracketed(|z| (50.0 * (z - 0.3)).tanh(), -10.0, 10.0, 1e-13).unwrap();
        assert!((r - 0.3).abs() < 1e-12);
    }
}
