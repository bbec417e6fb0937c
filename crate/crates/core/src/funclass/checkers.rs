//! Membership checkers and convergence diagnostics.
//!
//! All ratio work happens on logarithms: the deviation recorded for a pair
//! (v, x) is `|exp(ln g(x + vψ(x)) − ln g(x)) − 1|`, so functions whose
//! values leave the double range still check cleanly whenever an exact log
//! form is available (see [`crate::func::RealFn::log_eval`]).

use crate::error::{Error, Result};
use crate::func::RealFn;
use crate::grid::Grid;

use super::gamma::{gamma, theta, PsiSpec};
use super::Verdict;

/// Default tolerance on `|ratio − 1|` at the largest grid point.
pub const DEFAULT_TOL: f64 = 5e-3;
/// Default constant c in the domain constraint `x + vψ(x) ≥ c·x`.
pub const DEFAULT_DEF1_C: f64 = 0.5;
/// Verdict tie-break: deviations this close to the tolerance still pass.
const TIE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct CheckRow {
    pub v: f64,
    pub x: f64,
    pub ratio: f64,
    pub deviation: f64,
    /// Pair violated the domain constraint and was excluded, not failed.
    pub skipped: bool,
}

#[derive(Debug, Clone)]
pub struct ConvergenceDiagnostic {
    pub check: String,
    pub function: String,
    pub psi: String,
    pub v_window: (f64, f64),
    pub tol: f64,
    pub rows: Vec<CheckRow>,
    /// Per grid point: sup over unskipped v of the deviation.
    pub sup_deviation: Vec<(f64, f64)>,
    /// Largest-x deviation (the quantity compared against `tol`).
    pub tail_deviation: f64,
    pub trend_nonincreasing: bool,
    pub verdict: Verdict,
}

/// Scale-ψ local constancy check of `g` over `vlist` on `grid`.
pub fn check_psi_lcf(
    g: &RealFn,
    psi: &PsiSpec,
    vlist: &[f64],
    grid: &Grid,
    tol: f64,
) -> Result<ConvergenceDiagnostic> {
    check_psi_lcf_with(g, psi, vlist, grid, tol, DEFAULT_DEF1_C)
}

/// As [`check_psi_lcf`] with an explicit domain constant `c`: pairs with
/// `x + vψ(x) < c·x` are excluded from the verdict rather than failed.
pub fn check_psi_lcf_with(
    g: &RealFn,
    psi: &PsiSpec,
    vlist: &[f64],
    grid: &Grid,
    tol: f64,
    c: f64,
) -> Result<ConvergenceDiagnostic> {
    if vlist.is_empty() || grid.is_empty() {
        return Err(Error::Spec("membership check needs a v list and a grid".into()));
    }
    if !(c > 0.0) {
        return Err(Error::Spec(format!("domain constant must be positive, got {c}")));
    }
    let mut rows = Vec::with_capacity(vlist.len() * grid.len());
    let mut sup_deviation: Vec<(f64, f64)> = Vec::with_capacity(grid.len());
    for &x in grid.points() {
        let psi_x = psi.eval(x)?;
        let l_x = g.log_eval(x)?;
        let mut sup: Option<f64> = None;
        for &v in vlist {
            let y = x + v * psi_x;
            if y < c * x || y <= 0.0 {
                rows.push(CheckRow {
                    v,
                    x,
                    ratio: f64::NAN,
                    deviation: f64::NAN,
                    skipped: true,
                });
                continue;
            }
            let ratio = (g.log_eval(y)? - l_x).exp();
            let deviation = (ratio - 1.0).abs();
            sup = Some(sup.map_or(deviation, |s: f64| s.max(deviation)));
            rows.push(CheckRow {
                v,
                x,
                ratio,
                deviation,
                skipped: false,
            });
        }
        if let Some(s) = sup {
            sup_deviation.push((x, s));
        }
    }

    let v_window = vlist.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |w, &v| {
        (w.0.min(v), w.1.max(v))
    });
    let last_x = grid.last();
    let tail_devs: Vec<f64> = rows
        .iter()
        .filter(|r| r.x == last_x && !r.skipped)
        .map(|r| r.deviation)
        .collect();
    let tail_deviation = tail_devs.iter().cloned().fold(0.0, f64::max);
    let tail_half_start = grid.tail()[0];
    let tail_sups: Vec<f64> = sup_deviation
        .iter()
        .filter(|(x, _)| *x >= tail_half_start)
        .map(|(_, h)| *h)
        .collect();
    let trend_nonincreasing = tail_sups
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-9) + TIE);
    let verdict = if tail_devs.is_empty() {
        Verdict::Indeterminate
    } else if tail_deviation <= tol + TIE && trend_nonincreasing {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(ConvergenceDiagnostic {
        check: if psi.name() == "1.0" { "lcf".into() } else { "psi-lcf".into() },
        function: g.name().to_string(),
        psi: psi.name().to_string(),
        v_window,
        tol,
        rows,
        sup_deviation,
        tail_deviation,
        trend_nonincreasing,
        verdict,
    })
}

/// Plain local constancy (ψ ≡ 1).
pub fn check_lcf(g: &RealFn, grid: &Grid, tol: f64) -> Result<ConvergenceDiagnostic> {
    check_psi_lcf(g, &PsiSpec::unit(), &super::default_vlist(), grid, tol)
}

/// Sup over a v-grid of `|g(x + vψ(x))/g(x) − 1|` at a single x.
pub fn uniform_deviation(
    g: &RealFn,
    psi: &PsiSpec,
    v1: f64,
    v2: f64,
    x: f64,
    vsteps: usize,
) -> Result<f64> {
    if !(v2 > v1) || vsteps < 2 {
        return Err(Error::Spec("uniform_deviation needs v2 > v1 and vsteps >= 2".into()));
    }
    let psi_x = psi.eval(x)?;
    let l_x = g.log_eval(x)?;
    let mut sup: Option<f64> = None;
    for k in 0..vsteps {
        let v = v1 + (v2 - v1) * k as f64 / (vsteps - 1) as f64;
        let y = x + v * psi_x;
        if y < DEFAULT_DEF1_C * x || y <= 0.0 {
            continue;
        }
        let dev = ((g.log_eval(y)? - l_x).exp() - 1.0).abs();
        sup = Some(sup.map_or(dev, |s: f64| s.max(dev)));
    }
    sup.ok_or_else(|| {
        Error::Domain(format!(
            "window [{v1}, {v2}] lies entirely outside the domain constraint at x = {x}"
        ))
    })
}

/// Local drift ε̂(x) = ψ(x) · d ln g / dx by central differences with step
/// ψ(x)/100 — the natural local scale.
pub fn extract_epsilon(g: &RealFn, psi: &PsiSpec, x: f64) -> Result<f64> {
    let h = psi.eval(x)? / 100.0;
    let up = g.log_eval(x + h)?;
    let down = g.log_eval(x - h)?;
    let slope = (up - down) / (2.0 * h);
    let eps = psi.eval(x)? * slope;
    if eps.is_finite() {
        Ok(eps)
    } else {
        Err(Error::Domain(format!(
            "non-finite difference quotient for `{}` at x = {x}",
            g.name()
        )))
    }
}

#[derive(Debug, Clone)]
pub struct UpperPowerReport {
    pub function: String,
    /// (p, inf over the grid tail of g(x)/g(px)).
    pub c_hat: Vec<(f64, f64)>,
    pub min_c: f64,
    pub margin: f64,
    pub lcf: Verdict,
    pub verdict: Verdict,
}

/// Upper-power check: g must be locally constant and satisfy
/// `g(x) ≥ c(p)·g(px)` with the compression constants bounded away from 0.
pub fn check_upper_power(
    g: &RealFn,
    pgrid: &[f64],
    grid: &Grid,
    margin: f64,
) -> Result<UpperPowerReport> {
    if pgrid.is_empty() || pgrid.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::Spec("p grid must lie inside (0, 1)".into()));
    }
    let lcf = check_lcf(g, grid, DEFAULT_TOL)?.verdict;
    let mut c_hat = Vec::with_capacity(pgrid.len());
    let mut min_c = f64::INFINITY;
    for &p in pgrid {
        let mut inf: Option<f64> = None;
        for &x in grid.tail() {
            let r = (g.log_eval(x)? - g.log_eval(p * x)?).exp();
            inf = Some(inf.map_or(r, |c: f64| c.min(r)));
        }
        let v = inf.unwrap_or(0.0);
        min_c = min_c.min(v);
        c_hat.push((p, v));
    }
    let verdict = if lcf == Verdict::Pass && min_c >= margin - TIE {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(UpperPowerReport {
        function: g.name().to_string(),
        c_hat,
        min_c,
        margin,
        lcf,
        verdict,
    })
}

/// |ln g(x)| / γ(x): the growth diagnostic that must sink toward 0 for
/// members of the scale-ψ class.
pub fn log_growth_ratio(g: &RealFn, psi: &PsiSpec, x: f64) -> Result<f64> {
    let gam = gamma(psi, x)?;
    if gam <= 0.0 {
        return Err(Error::Domain(format!("gamma({x}) = {gam} is not positive")));
    }
    Ok(g.log_eval(x)?.abs() / gam)
}

/// |ln g(x)| / θ(x), the surrogate for regularly varying scales.
pub fn log_growth_ratio_theta(g: &RealFn, psi: &PsiSpec, x: f64) -> Result<f64> {
    let th = theta(psi, x)?;
    if th <= 0.0 {
        return Err(Error::Domain(format!("theta({x}) = {th} is not positive")));
    }
    Ok(g.log_eval(x)?.abs() / th)
}
