//! Scale functions ψ and the clocks γ(x) = ∫₁ˣ dt/ψ(t), θ(x) = x/ψ(x).

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::func::RealFn;
use crate::grid::Grid;
use crate::quad::{adaptive_simpson, PANEL_TOL};
use crate::roots::{bracket_upward, illinois_root};

use super::condition_a::{check_class_k, check_class_k1, ClassKConfig, ConditionAReport};
use super::Verdict;

/// Largest x probed when inverting γ or θ.
const X_CAP: f64 = 1e15;
/// Largest shift magnitude probed by [`solve_shift`].
const R_CAP: f64 = 1e12;

type CachedReport = std::result::Result<ConditionAReport, String>;

/// A validated non-decreasing scale function ψ ≥ 1.
///
/// Construction verifies, on a geometric certificate grid, that ψ ≥ 1 from
/// `x0` on and that ψ is non-decreasing. Whether ψ(x)/x decreases to zero
/// and whether θ(x) = x/ψ(x) is strictly increasing are recorded as flags;
/// the class checks require them but other operations do not.
#[derive(Debug, Clone)]
pub struct PsiSpec {
    fun: RealFn,
    x0: f64,
    cert_grid: Vec<f64>,
    o_of_x: bool,
    theta_increasing: bool,
    cond_a: OnceLock<CachedReport>,
}

impl PsiSpec {
    pub fn new(fun: RealFn, x0: f64) -> Result<Self> {
        if !(x0 >= 0.0) {
            return Err(Error::Spec(format!("x0 must be >= 0, got {x0}")));
        }
        let start = x0.max(1.0);
        let mut cert_grid: Vec<f64> = Grid::geometric(start, 2.0, 44).points().to_vec();
        if x0 > 0.0 && x0 < start {
            cert_grid.insert(0, x0);
        }
        let mut values = Vec::with_capacity(cert_grid.len());
        for &x in &cert_grid {
            let v = fun.eval(x)?;
            if !v.is_finite() {
                return Err(Error::Spec(format!(
                    "psi `{}` is not finite at x = {x}",
                    fun.name()
                )));
            }
            if v < 1.0 - 1e-9 {
                return Err(Error::Spec(format!(
                    "psi `{}` must be >= 1 for x >= {x0}; found {v} at x = {x}",
                    fun.name()
                )));
            }
            values.push(v);
        }
        for w in values.windows(2) {
            if w[1] < w[0] * (1.0 - 1e-9) {
                return Err(Error::Spec(format!(
                    "psi `{}` is not non-decreasing on the certificate grid",
                    fun.name()
                )));
            }
        }
        let ratios: Vec<f64> = cert_grid
            .iter()
            .zip(&values)
            .map(|(&x, &p)| p / x)
            .collect();
        let o_of_x = ratios
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + 1e-9))
            && ratios[ratios.len() - 1] <= 0.5 * ratios[0];
        let thetas: Vec<f64> = cert_grid
            .iter()
            .zip(&values)
            .map(|(&x, &p)| x / p)
            .collect();
        let theta_increasing = thetas.windows(2).all(|w| w[1] > w[0] * (1.0 + 1e-9));
        Ok(PsiSpec {
            fun,
            x0,
            cert_grid,
            o_of_x,
            theta_increasing,
            cond_a: OnceLock::new(),
        })
    }

    pub fn parse(text: &str, x0: f64) -> Result<Self> {
        Self::new(RealFn::parse(text)?, x0)
    }

    /// ψ ≡ 1, the trivial scale of plain local constancy.
    pub fn unit() -> Self {
        Self::new(RealFn::one(), 0.0).expect("constant 1 is a valid scale")
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = self.fun.eval(x)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::Domain(format!(
                "psi `{}` is non-positive ({v}) at x = {x}",
                self.fun.name()
            )))
        }
    }

    pub fn name(&self) -> &str {
        self.fun.name()
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn fun(&self) -> &RealFn {
        &self.fun
    }

    pub fn certificate_grid(&self) -> &[f64] {
        &self.cert_grid
    }

    /// Grid evidence that ψ(x)/x decreases toward 0.
    pub fn is_o_of_x(&self) -> bool {
        self.o_of_x
    }

    /// Grid evidence that θ(x) = x/ψ(x) strictly increases.
    pub fn theta_is_increasing(&self) -> bool {
        self.theta_increasing
    }

    /// Lower-bound table a(v) under the default configuration, cached.
    pub fn condition_a(&self) -> Result<&ConditionAReport> {
        let cached = self.cond_a.get_or_init(|| {
            super::condition_a::estimate_condition_a(self, &super::condition_a::CondAConfig::default())
                .map_err(|e| e.to_string())
        });
        cached.as_ref().map_err(|s| Error::Spec(s.clone()))
    }
}

fn inv_psi_integrand<'a>(psi: &'a PsiSpec) -> impl Fn(f64) -> Result<f64> + 'a {
    move |t| {
        let p = psi.eval(t)?;
        Ok(1.0 / p)
    }
}

/// γ(x) = ∫₁ˣ dt/ψ(t).
pub fn gamma(psi: &PsiSpec, x: f64) -> Result<f64> {
    if x < 1.0 {
        return Err(Error::Domain(format!("gamma requires x >= 1, got {x}")));
    }
    adaptive_simpson(inv_psi_integrand(psi), 1.0, x, PANEL_TOL)
}

/// Increment γ(b) − γ(a) without re-integrating from 1.
pub fn gamma_increment(psi: &PsiSpec, a: f64, b: f64) -> Result<f64> {
    adaptive_simpson(inv_psi_integrand(psi), a, b, PANEL_TOL)
}

/// Inverse clock: the y with γ(y) = t, located by doubling then a
/// secant-guided bisection that integrates only the crossed subinterval at
/// each step. Guarantees `|γ(y) − t| ≤ 1e-9·max(1, t)`.
pub fn gamma_inverse(psi: &PsiSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("gamma_inverse requires t >= 0, got {t}")));
    }
    let tol = 1e-9 * t.max(1.0);
    if t <= tol {
        return Ok(1.0);
    }
    let mut lo = 1.0f64;
    let mut g_lo = 0.0f64;
    let mut hi = 2.0f64;
    let mut g_hi = gamma_increment(psi, 1.0, 2.0)?;
    while g_hi < t {
        let next = hi * 2.0;
        if next > X_CAP {
            return Err(Error::Bracket(format!(
                "gamma({:e}) = {g_hi:e} is still below t = {t:e}",
                hi
            )));
        }
        let inc = gamma_increment(psi, hi, next)?;
        lo = hi;
        g_lo = g_hi;
        hi = next;
        g_hi += inc;
    }
    if (g_hi - t).abs() <= tol {
        return Ok(hi);
    }
    for _ in 0..200 {
        let span = g_hi - g_lo;
        let mut frac = if span > 0.0 { (t - g_lo) / span } else { 0.5 };
        frac = frac.clamp(0.1, 0.9);
        let mid = lo + frac * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g_lo + gamma_increment(psi, lo, mid)?;
        if (g_mid - t).abs() <= tol {
            return Ok(mid);
        }
        if g_mid < t {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    Err(Error::Bracket(format!(
        "gamma inverse did not reach tolerance at t = {t}"
    )))
}

/// θ(x) = x/ψ(x).
pub fn theta(psi: &PsiSpec, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::Domain(format!("theta requires x > 0, got {x}")));
    }
    Ok(x / psi.eval(x)?)
}

/// Inverse of θ, for ψ whose certificate shows θ strictly increasing.
pub fn theta_inverse(psi: &PsiSpec, t: f64) -> Result<f64> {
    if !psi.theta_is_increasing() {
        return Err(Error::Domain(format!(
            "theta is not strictly increasing for psi `{}`; inverse rejected",
            psi.name()
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("theta_inverse requires t >= 0, got {t}")));
    }
    let start = psi.x0().max(1.0);
    let ftol = 1e-9 * t.max(1.0);
    let th_start = theta(psi, start)?;
    if (th_start - t).abs() <= ftol {
        return Ok(start);
    }
    if th_start > t {
        return Err(Error::Bracket(format!(
            "t = {t} is below theta({start}) = {th_start}"
        )));
    }
    let hi = bracket_upward(start * 2.0, X_CAP, |y| Ok(theta(psi, y)? >= t))?;
    let f = |y: f64| Ok(theta(psi, y)? - t);
    let flo = th_start - t;
    let fhi = theta(psi, hi)? - t;
    illinois_root(f, start, hi, flo, fhi, ftol)
}

/// Solve γ(x + r·ψ(x)) = γ(x) + v for r. Positive v brackets upward;
/// negative v brackets down to the edge of the domain.
pub fn solve_shift(psi: &PsiSpec, x: f64, v: f64) -> Result<f64> {
    if x < 1.0 {
        return Err(Error::Domain(format!("solve_shift requires x >= 1, got {x}")));
    }
    let tol = 1e-9;
    if v.abs() <= tol {
        return Ok(0.0);
    }
    let psi_x = psi.eval(x)?;
    // Increment of the clock along r, integrated only over the step crossed.
    let seg = |a: f64, b: f64| gamma_increment(psi, x + a * psi_x, x + b * psi_x);
    if v > 0.0 {
        let mut lo = 0.0f64;
        let mut g_lo = 0.0f64;
        let mut hi = 1.0f64;
        let mut g_hi = seg(0.0, 1.0)?;
        while g_hi < v {
            let next = hi * 2.0;
            if next > R_CAP {
                return Err(Error::Bracket(format!(
                    "no shift below the r-cap reaches clock increment {v}"
                )));
            }
            let inc = seg(hi, next)?;
            lo = hi;
            g_lo = g_hi;
            hi = next;
            g_hi += inc;
        }
        refine_shift(psi, x, psi_x, v, lo, g_lo, hi, g_hi, tol)
    } else {
        let lb = psi.x0().max(1.0);
        let r_min = (lb - x) / psi_x;
        if r_min >= 0.0 {
            return Err(Error::Domain(format!(
                "x = {x} leaves no room below the domain start {lb}"
            )));
        }
        let g_min = seg(0.0, r_min)?; // negative
        if g_min > v + tol {
            return Err(Error::Domain(format!(
                "clock increment {v} is unreachable above the domain start (limit {g_min})"
            )));
        }
        refine_shift(psi, x, psi_x, v, r_min, g_min, 0.0, 0.0, tol)
    }
}

#[allow(clippy::too_many_arguments)]
fn refine_shift(
    psi: &PsiSpec,
    x: f64,
    psi_x: f64,
    v: f64,
    mut lo: f64,
    mut g_lo: f64,
    mut hi: f64,
    mut g_hi: f64,
    tol: f64,
) -> Result<f64> {
    if (g_lo - v).abs() <= tol {
        return Ok(lo);
    }
    if (g_hi - v).abs() <= tol {
        return Ok(hi);
    }
    for _ in 0..200 {
        let span = g_hi - g_lo;
        let mut frac = if span > 0.0 { (v - g_lo) / span } else { 0.5 };
        frac = frac.clamp(0.1, 0.9);
        let mid = lo + frac * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g_lo + gamma_increment(psi, x + lo * psi_x, x + mid * psi_x)?;
        if (g_mid - v).abs() <= tol {
            return Ok(mid);
        }
        if g_mid < v {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    Err(Error::Bracket(format!(
        "shift refinement stalled for v = {v} at x = {x}"
    )))
}

/// Conjugate by the γ clock: t ↦ g(γ⁻¹(t)). Requires ψ in the admissible
/// class (condition-A table bounded away from zero with a diverging
/// integral); g is scale-ψ locally constant exactly when the conjugate is
/// plainly locally constant.
pub fn conjugate_gamma(g: &RealFn, psi: &PsiSpec) -> Result<RealFn> {
    let k = check_class_k(psi, &ClassKConfig::default())?;
    if k.verdict != Verdict::Pass {
        return Err(Error::Spec(format!(
            "psi `{}` fails the class-K admissibility check: {}",
            psi.name(),
            k.reasons.join("; ")
        )));
    }
    let name = format!("({}) o gamma_inv[{}]", g.name(), psi.name());
    let psi_arc = Arc::new(psi.clone());
    let psi_arc2 = Arc::clone(&psi_arc);
    let g1 = g.clone();
    let g2 = g.clone();
    Ok(RealFn::with_log(
        name,
        move |t| g1.eval(gamma_inverse(&psi_arc, t)?),
        move |t| g2.log_eval(gamma_inverse(&psi_arc2, t)?),
    ))
}

/// Conjugate by the θ clock: t ↦ g(θ⁻¹(t)). Requires the stricter
/// regularly-varying class (index below one, smooth expansion).
pub fn conjugate_theta(g: &RealFn, psi: &PsiSpec) -> Result<RealFn> {
    let k1 = check_class_k1(psi);
    if k1.verdict != Verdict::Pass {
        return Err(Error::Spec(format!(
            "psi `{}` fails the class-K1 admissibility check: {}",
            psi.name(),
            k1.reasons.join("; ")
        )));
    }
    let name = format!("({}) o theta_inv[{}]", g.name(), psi.name());
    let psi_arc = Arc::new(psi.clone());
    let psi_arc2 = Arc::clone(&psi_arc);
    let g1 = g.clone();
    let g2 = g.clone();
    Ok(RealFn::with_log(
        name,
        move |t| g1.eval(theta_inverse(&psi_arc, t)?),
        move |t| g2.log_eval(theta_inverse(&psi_arc2, t)?),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psi(text: &str) -> PsiSpec {
        PsiSpec::parse(text, 1.0).unwrap()
    }

    #[test]
    fn gamma_closed_forms() {
        // psi = 1: gamma(x) = x - 1.
        let unit = PsiSpec::unit();
        assert!((gamma(&unit, 5.0).unwrap() - 4.0).abs() < 1e-10);
        // psi = t: gamma(x) = ln x.
        let linear = psi("x");
        let e2 = (2.0f64).exp();
        assert!((gamma(&linear, e2).unwrap() - 2.0).abs() < 1e-10);
        // psi = sqrt(t): gamma(x) = 2(sqrt(x) - 1).
        let root = psi("sqrt(x)");
        assert!((gamma(&root, 100.0).unwrap() - 18.0).abs() < 1e-10);
    }

    #[test]
    fn gamma_inverse_closed_forms() {
        let unit = PsiSpec::unit();
        assert!((gamma_inverse(&unit, 4.0).unwrap() - 5.0).abs() < 1e-8);
        let root = psi("sqrt(x)");
        assert!((gamma_inverse(&root, 18.0).unwrap() - 100.0).abs() < 1e-6);
    }

    #[test]
    fn gamma_round_trip_via_quadrature() {
        let p = psi("x^0.7");
        let y = gamma_inverse(&p, 7.0).unwrap();
        let back = gamma(&p, y).unwrap();
        assert!((back - 7.0).abs() <= 1e-9 * 7.0f64.max(1.0), "residual {}", back - 7.0);
    }

    #[test]
    fn theta_and_inverse() {
        let root = psi("sqrt(x)");
        assert!((theta(&root, 100.0).unwrap() - 10.0).abs() < 1e-12);
        assert!((theta_inverse(&root, 10.0).unwrap() - 100.0).abs() < 1e-6);
        let p9 = psi("x^0.9");
        let th = theta(&p9, 1e6).unwrap();
        assert!((th - 10f64.powf(0.6)).abs() < 1e-9, "theta = {th}");
        // Round trip contract.
        let t = 7.5;
        let y = theta_inverse(&p9, t).unwrap();
        assert!((theta(&p9, y).unwrap() - t).abs() <= 1e-9 * t.max(1.0));
    }

    #[test]
    fn theta_inverse_rejects_flat_theta() {
        let linear = psi("x"); // theta == 1 identically
        assert!(!linear.theta_is_increasing());
        assert!(theta_inverse(&linear, 3.0).is_err());
    }

    #[test]
    fn shift_closed_forms() {
        // psi = 1: gamma(x) = x - 1, so r = v exactly.
        let unit = PsiSpec::unit();
        let r = solve_shift(&unit, 50.0, 3.0).unwrap();
        assert!((r - 3.0).abs() < 1e-8);
        // psi = t: gamma = ln x, gamma(x + r x) = gamma(x) + ln(1 + r).
        let linear = psi("x");
        let r = solve_shift(&linear, 10.0, std::f64::consts::LN_2).unwrap();
        assert!((r - 1.0).abs() < 1e-8);
        // Substitution check for psi = sqrt(t).
        let root = psi("sqrt(x)");
        let x = 1e4;
        let r = solve_shift(&root, x, 1.0).unwrap();
        let lhs = gamma(&root, x + r * root.eval(x).unwrap()).unwrap();
        let rhs = gamma(&root, x).unwrap() + 1.0;
        assert!((lhs - rhs).abs() <= 1e-9, "residual {}", lhs - rhs);
        // Negative v is reachable by symmetric bracketing.
        let r = solve_shift(&root, x, -1.0).unwrap();
        assert!(r < 0.0);
        let lhs = gamma(&root, x + r * root.eval(x).unwrap()).unwrap();
        let rhs = gamma(&root, x).unwrap() - 1.0;
        assert!((lhs - rhs).abs() <= 1e-9);
    }

    #[test]
    fn psi_validation_rejects_bad_scales() {
        // Decreasing function.
        assert!(PsiSpec::parse("1/x", 1.0).is_err());
        // Dips below 1 on the certificate grid.
        assert!(PsiSpec::parse("x/1000000", 1.0).is_err());
    }
}
