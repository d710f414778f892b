//! Bracketed root-finding: bisection safeguarded with secant and inverse
//! quadratic steps (Brent's method, after Numerical Recipes).

#[derive(Debug, Clone, thiserror::Error)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    NoBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("function value is NaN at x = {x}")]
    NotANumber { x: f64 },
    #[error("root iteration budget exhausted near x = {x}")]
    Budget { x: f64 },
}

const MAX_ITER: usize = 200;

/// Find the root of `f` bracketed by [lo, hi]; the bracket is narrowed to
/// width `tol` (plus a machine-precision floor).
pub fn find_root<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, RootError>
where
    F: FnMut(f64) -> f64,
{
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.is_nan() {
        return Err(RootError::NotANumber { x: a });
    }
    if fb.is_nan() {
        return Err(RootError::NotANumber { x: b });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(RootError::NoBracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let mut c = b;
    let mut fc = fb;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITER {
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
            // Attempt inverse quadratic interpolation (secant when a == c).
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
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
        b += if d.abs() > tol1 {
            d
        } else {
            tol1.copysign(xm)
        };
        fb = f(b);
        if fb.is_nan() {
            return Err(RootError::NotANumber { x: b });
        }
    }
    Err(RootError::Budget { x: b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let x = find_root(|x| x * x - 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert!((x - 2.0f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn no_bracket_rejected() {
        let err = find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, RootError::NoBracket { .. }));
    }

    #[test]
    fn nan_propagates() {
        let err = find_root(|x| if x > 0.5 { f64::NAN } else { -1.0 }, 0.0, 1.0, 1e-12);
        assert!(matches!(err, Err(RootError::NotANumber { .. })));
    }

    #[test]
    fn returned_point_is_inside_a_sign_change() {
        // The final bracket [b - tol, b + tol] must straddle the root.
        let tol = 1e-9;
        let f = |x: f64| (x - 0.3).tanh();
        let x = find_root(f, -1.0, 1.0, tol).unwrap();
        assert!(f(x - 2.0 * tol) * f(x + 2.0 * tol) < 0.0);
    }
}
