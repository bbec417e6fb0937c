//! Experiment configuration: the JSON wire format consumed by the CLI and
//! echoed into manifests. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func::RealFn;
use crate::ldt::{Experiment, EstimatorKind};
use crate::tails::{Regime, TailModel, ZoneSpec};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// "pareto" | "pareto-two-sided" | "exponential" | "expr"
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    /// Right-tail expression for `kind = "expr"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fplus: Option<String>,
    /// Optional dominating function expression.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_left: Option<f64>,
}

impl ModelConfig {
    pub fn build(&self) -> Result<TailModel> {
        match self.kind.as_str() {
            "pareto" => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| Error::Spec("pareto models need `alpha`".into()))?;
                TailModel::pareto(alpha)
            }
            "pareto-two-sided" => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| Error::Spec("pareto models need `alpha`".into()))?;
                TailModel::pareto_two_sided(alpha)
            }
            "exponential" => {
                if self.rate.is_none_or(|r| r == 1.0) {
                    TailModel::exponential()
                } else {
                    Err(Error::Spec("only unit-rate exponential control is supported".into()))
                }
            }
            "expr" => {
                let fplus = self
                    .fplus
                    .as_deref()
                    .ok_or_else(|| Error::Spec("expr models need `fplus`".into()))?;
                let x0 = self
                    .x0
                    .ok_or_else(|| Error::Spec("expr models need `x0`".into()))?;
                let alpha = self
                    .alpha
                    .ok_or_else(|| Error::Spec("expr models need `alpha`".into()))?;
                let v = self.v.as_deref().map(RealFn::parse).transpose()?;
                TailModel::from_expr(RealFn::parse(fplus)?, x0, alpha, v, self.c_left.unwrap_or(1.0))
            }
            other => Err(Error::Spec(format!("unknown model kind `{other}`"))),
        }
    }

    pub fn from_model(model: &TailModel) -> Self {
        ModelConfig {
            kind: model.kind_name().to_string(),
            alpha: model.alpha(),
            x0: Some(model.x0()),
            rate: model.rate(),
            fplus: model.expr_text(),
            v: model.v_text(),
            c_left: Some(model.c_left()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoneConfig {
    /// "finite-variance" | "infinite-variance"
    pub regime: String,
    /// Boundary h as an expression in the variable x (standing for n).
    pub h: String,
}

impl ZoneConfig {
    pub fn build(&self) -> Result<ZoneSpec> {
        let regime = match self.regime.as_str() {
            "finite-variance" => Regime::FiniteVariance,
            "infinite-variance" => Regime::InfiniteVariance,
            other => {
                return Err(Error::Spec(format!(
                    "unknown regime `{other}` (expected finite-variance or infinite-variance)"
                )))
            }
        };
        ZoneSpec::parse(&self.h, regime)
    }
}

fn default_estimator() -> String {
    "both".to_string()
}

fn default_window() -> f64 {
    5.0
}

fn default_band() -> (f64, f64) {
    (0.7, 1.4)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub zone: ZoneConfig,
    pub n_list: Vec<u64>,
    pub reps: u64,
    pub seed: u64,
    #[serde(default = "default_estimator")]
    pub estimator: String,
    #[serde(default = "default_window")]
    pub big_jump_window: f64,
    #[serde(default = "default_band")]
    pub band: (f64, f64),
    /// Explicit x per cell, overriding x = h(n).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
}

impl ExperimentConfig {
    pub fn build(&self) -> Result<Experiment> {
        let estimator = match self.estimator.as_str() {
            "crude" => EstimatorKind::Crude,
            "big-jump" => EstimatorKind::BigJump,
            "both" => EstimatorKind::Both,
            other => {
                return Err(Error::Spec(format!(
                    "unknown estimator `{other}` (expected crude, big-jump or both)"
                )))
            }
        };
        Ok(Experiment {
            model: self.model.build()?,
            zone: self.zone.build()?,
            n_list: self.n_list.clone(),
            x_list: self.x_list.clone(),
            reps: self.reps,
            estimator,
            seed: self.seed,
            big_jump_window: self.big_jump_window,
            band: self.band,
        })
    }
}
