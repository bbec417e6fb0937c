//! Adaptive Simpson quadrature.
//!
//! Panels are bisected until the Richardson estimate of the panel error
//! drops below an absolute per-panel tolerance; the extrapolated value is
//! returned. Integrands must be finite on the closed interval.

use crate::error::{Error, Result};

/// Per-panel absolute tolerance used throughout the crate.
pub const PANEL_TOL: f64 = 1e-12;

const MAX_DEPTH: u32 = 56;

/// Integrate `f` over `[a, b]` (sign-aware when `a > b`).
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, panel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return adaptive_simpson(f, b, a, panel_tol).map(|v| -v);
    }
    let fa = eval_finite(&f, a)?;
    let m = 0.5 * (a + b);
    let fm = eval_finite(&f, m)?;
    let fb = eval_finite(&f, b)?;
    let whole = simpson(a, b, fa, fm, fb);
    recurse(&f, a, m, b, fa, fm, fb, whole, panel_tol, MAX_DEPTH)
}

fn eval_finite<F>(f: &F, x: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let v = f(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Quadrature(format!("integrand is {v} at t = {x}")))
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &F,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = eval_finite(f, lm)?;
    let frm = eval_finite(f, rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (m - a).abs() <= f64::EPSILON * a.abs().max(1.0) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "panel [{a}, {b}] did not converge (residual {delta:e})"
        )));
    }
    let l = recurse(f, a, lm, m, fa, flm, fm, left, tol, depth - 1)?;
    let r = recurse(f, m, rm, b, fm, frm, fb, right, tol, depth - 1)?;
    Ok(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_log_integrals() {
        let v = adaptive_simpson(|x| Ok(x * x), 0.0, 1.0, PANEL_TOL).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        let v = adaptive_simpson(|t| Ok(1.0 / t), 1.0, std::f64::consts::E, PANEL_TOL).unwrap();
        assert!((v - 1.0).abs() < 1e-11);
        let v = adaptive_simpson(|t| Ok(t.exp()), 0.0, 1.0, PANEL_TOL).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn oriented_intervals() {
        let fwd = adaptive_simpson(Ok, 0.0, 2.0, PANEL_TOL).unwrap();
        let bwd = adaptive_simpson(Ok, 2.0, 0.0, PANEL_TOL).unwrap();
        assert_eq!(fwd, -bwd);
        assert_eq!(adaptive_simpson(Ok, 3.0, 3.0, PANEL_TOL).unwrap(), 0.0);
    }

    #[test]
    fn singular_integrand_is_rejected() {
        // 1/sqrt(t) is infinite at the left endpoint.
        let r = adaptive_simpson(|t| Ok(1.0 / t.sqrt()), 0.0, 1.0, PANEL_TOL);
        assert!(r.is_err());
    }

    #[test]
    fn decaying_tail_integral() {
        // Integral of t^{-3/2} over [1, 1e8] = 2(1 - 1e-4).
        let v = adaptive_simpson(|t| Ok(t.powf(-1.5)), 1.0, 1e8, PANEL_TOL).unwrap();
        assert!((v - 2.0 * (1.0 - 1e-4)).abs() < 1e-9);
    }
}
