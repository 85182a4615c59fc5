//! Bracketed scalar root finders used by the spectrum module.

use crate::error::Result;

/// Relative bracket width at which iteration stops.
const X_TOL: f64 = 4e-16;

/// Newton's method safeguarded by bisection on a sign-changing bracket.
///
/// `f` returns the value and derivative. Requires `f(lo)` and `f(hi)` of
/// opposite sign; returns a point of the final bracket.
pub fn safeguarded_newton(
    mut f: impl FnMut(f64) -> Result<(f64, f64)>,
    mut lo: f64,
    mut hi: f64,
) -> Result<f64> {
    let (flo, _) = f(lo)?;
    let lo_sign = flo.signum();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let width = (hi - lo).abs();
        if width <= X_TOL * x.abs().max(1.0) {
            return Ok(x);
        }
        let newton = x - fx / dfx;
        let inside = newton.is_finite() && (newton - lo) * (newton - hi) < 0.0;
        let step = (newton - x).abs();
        if inside && step < 0.5 * width {
            if step <= X_TOL * x.abs().max(1.0) {
                return Ok(newton);
            }
            x = newton;
        } else {
            x = 0.5 * (lo + hi);
        }
    }
    Ok(x)
}

/// Illinois variant of regula falsi for a sign-changing bracket.
pub fn illinois(mut f: impl FnMut(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = f(lo)?;
    let mut fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let x = (lo * fhi - hi * flo) / (fhi - flo);
        let x = if x.is_finite() && x > lo.min(hi) && x < lo.max(hi) {
            x
        } else {
            0.5 * (lo + hi)
        };
        let fx = f(x)?;
        if fx == 0.0 || (hi - lo).abs() <= X_TOL * x.abs().max(1.0) {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (lo + hi))
}
