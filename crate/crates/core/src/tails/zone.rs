//! Deviation zones x ≥ h(n) and the scale function they induce.
//!
//! In the finite-variance regime the boundary h must outgrow √(v ln v) and
//! the induced scale is ψ(t) = √(h⁻¹(t)); with infinite variance h must
//! outgrow σ(v) = V⁻¹(1/v) and ψ(t) = σ(h⁻¹(t)). For power-law boundaries
//! h(v) = c·v^β the compositions collapse to closed-form powers.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::func::RealFn;
use crate::funclass::PsiSpec;

use super::invert::{generalized_inverse, sigma};
use super::TailModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    FiniteVariance,
    InfiniteVariance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerForm {
    pub coeff: f64,
    pub beta: f64,
}

#[derive(Debug, Clone)]
pub struct ZoneSpec {
    pub h: RealFn,
    pub regime: Regime,
    pub power_form: Option<PowerForm>,
}

#[derive(Debug, Clone)]
pub struct ZoneDiag {
    /// (n, h(n)/reference-scale) along the probe grid.
    pub ratios: Vec<(f64, f64)>,
    /// Domination evidence: the ratio increases beyond the probe midpoint.
    pub increasing_beyond_midpoint: bool,
}

impl ZoneSpec {
    pub fn new(h: RealFn, regime: Regime) -> Self {
        ZoneSpec {
            h,
            regime,
            power_form: None,
        }
    }

    /// Builds from an expression, detecting power-law shapes `c·x^β` so the
    /// induced scale can use its closed form.
    pub fn from_expr(ast: Expr, regime: Regime) -> Self {
        let power_form = detect_power_form(&ast);
        ZoneSpec {
            h: RealFn::from_expr(ast),
            regime,
            power_form,
        }
    }

    pub fn parse(text: &str, regime: Regime) -> Result<Self> {
        Ok(Self::from_expr(crate::expr::parse(text)?, regime))
    }

    /// Check `h ≫ reference scale` on a probe grid: the ratio must be
    /// strictly increasing beyond the midpoint.
    pub fn diagnose(&self, model: &TailModel, n_probe: &[f64]) -> Result<ZoneDiag> {
        let mut ratios = Vec::with_capacity(n_probe.len());
        for &n in n_probe {
            let h = self.h.eval(n)?;
            let reference = match self.regime {
                Regime::FiniteVariance => (n * n.ln().max(1e-300)).sqrt(),
                Regime::InfiniteVariance => sigma(&model.v_fn()?, n)?,
            };
            ratios.push((n, h / reference));
        }
        let mid = ratios.len() / 2;
        let increasing = ratios[mid..].windows(2).all(|w| w[1].1 > w[0].1);
        Ok(ZoneDiag {
            ratios,
            increasing_beyond_midpoint: increasing,
        })
    }
}

fn detect_power_form(ast: &Expr) -> Option<PowerForm> {
    match ast {
        Expr::Var => Some(PowerForm { coeff: 1.0, beta: 1.0 }),
        Expr::Sqrt(inner) if **inner == Expr::Var => Some(PowerForm { coeff: 1.0, beta: 0.5 }),
        Expr::Pow(base, exp) => match (&**base, &**exp) {
            (Expr::Var, Expr::Const(b)) => Some(PowerForm { coeff: 1.0, beta: *b }),
            _ => None,
        },
        Expr::Mul(a, b) => match (&**a, &**b) {
            (Expr::Const(c), rest) => detect_power_form(rest).map(|p| PowerForm {
                coeff: *c * p.coeff,
                beta: p.beta,
            }),
            _ => None,
        },
        _ => None,
    }
}

fn default_probe() -> Vec<f64> {
    (2..=12).map(|k| 4f64.powi(k)).collect()
}

/// Scale function induced by the zone: `√(h⁻¹(t))` with finite variance,
/// `σ(h⁻¹(t))` with infinite variance; closed-form powers where the inputs
/// are powers.
pub fn choose_psi(zone: &ZoneSpec, model: &TailModel) -> Result<PsiSpec> {
    let diag = zone.diagnose(model, &default_probe())?;
    if !diag.increasing_beyond_midpoint {
        return Err(Error::Spec(format!(
            "zone boundary `{}` does not dominate the regime scale on the probe grid",
            zone.h.name()
        )));
    }
    match zone.regime {
        Regime::FiniteVariance => {
            if let Some(PowerForm { coeff, beta }) = zone.power_form {
                let exponent = 1.0 / (2.0 * beta);
                let ast = power_ast(coeff, exponent);
                PsiSpec::new(RealFn::from_expr(ast), coeff.max(1.0))
            } else {
                let h = zone.h.clone();
                let name = format!("sqrt(inv[{}])", h.name());
                let x0 = h.eval(1.0)?.max(1.0);
                PsiSpec::new(
                    RealFn::new(name, move |t| {
                        Ok(generalized_inverse(&h, t)?.value.sqrt())
                    }),
                    x0,
                )
            }
        }
        Regime::InfiniteVariance => {
            let alpha = model.alpha().ok_or_else(|| {
                Error::Spec("infinite-variance zones need a tail index".into())
            })?;
            if !(-2.0 < alpha && alpha < -1.0) {
                return Err(Error::Spec(format!(
                    "infinite-variance regime expects an index in (-2, -1), got {alpha}"
                )));
            }
            match (zone.power_form, model.v_is_pure_power()) {
                (Some(PowerForm { coeff: 1.0, beta }), true) => {
                    let exponent = -1.0 / (alpha * beta);
                    let ast = power_ast(1.0, exponent);
                    PsiSpec::new(RealFn::from_expr(ast), 1.0)
                }
                _ => {
                    let h = zone.h.clone();
                    let vfn = Arc::new(model.v_fn()?);
                    let name = format!("sigma[{}](inv[{}])", vfn.name(), h.name());
                    let x0 = h.eval(1.0)?.max(1.0);
                    PsiSpec::new(
                        RealFn::new(name, move |t| {
                            let v = generalized_inverse(&h, t)?.value.max(1.0);
                            sigma(&vfn, v)
                        }),
                        x0,
                    )
                }
            }
        }
    }
}

fn power_ast(coeff: f64, exponent: f64) -> Expr {
    let base = if coeff == 1.0 {
        Expr::Var
    } else {
        Expr::Div(Box::new(Expr::Var), Box::new(Expr::Const(coeff)))
    };
    if exponent == 1.0 {
        base
    } else {
        Expr::Pow(Box::new(base), Box::new(Expr::Const(exponent)))
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmallnessReport {
    /// n·V(x)²/F₊(x); must sink toward 0 along a zone path.
    pub ratio: f64,
    /// Estimated exponent gap ln(V/F₊)/ln x at this x.
    pub eps_gap: f64,
    /// Whether the gap certifies the smallness condition outright
    /// (gap < −α − 2, meaningful in the finite-variance regime).
    pub sufficient: bool,
}

/// The smallness condition linking the dominating bound to the tail.
pub fn check_smallness(model: &TailModel, n: u64, x: f64) -> Result<SmallnessReport> {
    if !model.has_v() {
        return Err(Error::Spec("the smallness check needs a dominating function".into()));
    }
    if !(x > 1.0) {
        return Err(Error::Domain(format!("check_smallness needs x > 1, got {x}")));
    }
    let v = model.v_prob(x)?;
    let f = model.tail_prob(x);
    let ratio = n as f64 * v * v / f;
    let eps_gap = (v / f).ln() / x.ln();
    let sufficient = match model.alpha() {
        Some(a) => eps_gap + 1e-12 < -a - 2.0,
        None => false,
    };
    Ok(SmallnessReport {
        ratio,
        eps_gap,
        sufficient,
    })
}
