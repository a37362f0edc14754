//! JSON run configuration shared by the command-line tool and the C API.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::PhaseBox;
use crate::model::Model;
use crate::policy::{Activist, DebtTargeting, FiscalRegime, TaylorRule};
use crate::prefs::{calibrate_delta, ModelParams};

/// Preferences and demographics. Exactly one of `delta` and `velocity`
/// must be given; `beta`, if present, must equal `n + mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub rho: f64,
    pub mu: f64,
    pub n: f64,
    pub eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

/// Rule with `π*` either given or implied by the target liabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleConfig {
    pub r_star: f64,
    pub slope_at_target: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi_star: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegimeConfig {
    DebtTargeting {
        a_star: f64,
        phi: f64,
    },
    Activist {
        theta0: f64,
        theta1: f64,
        /// Derived from `a_star` when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma0: Option<f64>,
        gamma1: f64,
        a_threshold: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta_floor: Option<f64>,
        /// Target liabilities used to anchor the rule and `γ0`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a_star: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    pub rtol: f64,
    pub atol: f64,
    /// Forward horizon for basins and trajectories, years.
    pub horizon: f64,
    /// Backward horizon for the connecting orbit, years.
    pub orbit_horizon: f64,
    pub seed_eps: f64,
    pub sample_interval: f64,
    /// Basin grid points along `a` and `π`.
    pub resolution: [usize; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basin_box: Option<PhaseBox>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi_range: Option<[f64; 2]>,
    pub isocline_points: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            rtol: 1e-9,
            atol: 1e-12,
            horizon: 2000.0,
            orbit_horizon: 5000.0,
            seed_eps: 1e-6,
            sample_interval: 0.1,
            resolution: [41, 41],
            basin_box: None,
            pi_range: None,
            isocline_points: 801,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Free-form label copied into emitted metadata.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    pub params: ParamsConfig,
    pub rule: RuleConfig,
    pub regime: RegimeConfig,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

fn positive(out: &mut Vec<String>, name: &str, x: f64) {
    if !(x > 0.0 && x.is_finite()) {
        out.push(format!("{name} must be > 0 (got {x})"));
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Config reproducing `model` exactly.
    pub fn from_model(model: &Model, numerics: Numerics) -> Self {
        let p = &model.params;
        let regime = match model.regime {
            FiscalRegime::DebtTargeting(d) => RegimeConfig::DebtTargeting {
                a_star: d.a_star,
                phi: d.phi,
            },
            FiscalRegime::Activist(a) => RegimeConfig::Activist {
                theta0: a.theta0,
                theta1: a.theta1,
                gamma0: Some(a.gamma0),
                gamma1: a.gamma1,
                a_threshold: a.a_threshold,
                theta_floor: a.theta_floor,
                a_star: None,
            },
        };
        RunConfig {
            experiment: None,
            params: ParamsConfig {
                rho: p.rho,
                mu: p.mu,
                n: p.n,
                eps: p.eps,
                delta: Some(p.delta),
                velocity: None,
                beta: None,
            },
            rule: RuleConfig {
                r_star: model.rule.r_star,
                slope_at_target: model.rule.slope_at_target,
                pi_star: Some(model.rule.pi_star),
            },
            regime,
            numerics,
            output_dir: None,
        }
    }

    fn numerics_problems(&self) -> Vec<String> {
        let n = &self.numerics;
        let mut out = Vec::new();
        positive(&mut out, "numerics.rtol", n.rtol);
        positive(&mut out, "numerics.atol", n.atol);
        positive(&mut out, "numerics.horizon", n.horizon);
        positive(&mut out, "numerics.orbit_horizon", n.orbit_horizon);
        positive(&mut out, "numerics.seed_eps", n.seed_eps);
        positive(&mut out, "numerics.sample_interval", n.sample_interval);
        if n.resolution.contains(&0) {
            out.push("numerics.resolution entries must be >= 1".into());
        }
        if n.isocline_points < 2 {
            out.push("numerics.isocline_points must be >= 2".into());
        }
        if let Some([lo, hi]) = n.pi_range {
            if !(lo < hi) {
                out.push(format!("numerics.pi_range must be increasing (got [{lo}, {hi}])"));
            }
        }
        if let Some(b) = n.basin_box {
            if !(b.a_min < b.a_max && b.pi_min < b.pi_max) {
                out.push("numerics.basin_box is empty".into());
            }
        }
        out
    }

    /// Builds the model, reporting every invalid field at once.
    pub fn build(&self) -> Result<Model> {
        let mut problems = self.numerics_problems();
        let pc = &self.params;

        if let Some(b) = pc.beta {
            if (b - (pc.n + pc.mu)).abs() > 1e-12 {
                problems.push(format!(
                    "params.beta must equal n + mu (got beta = {b}, n + mu = {})",
                    pc.n + pc.mu
                ));
            }
        }
        let delta = match (pc.delta, pc.velocity) {
            (Some(d), None) => Some(d),
            (None, Some(v)) => match calibrate_delta(v, self.rule.r_star, pc.eps) {
                Ok(d) => Some(d),
                Err(e) => {
                    problems.push(format!("params.velocity: {e}"));
                    None
                }
            },
            _ => {
                problems.push("params: give exactly one of delta and velocity".into());
                None
            }
        };
        let params = ModelParams {
            rho: pc.rho,
            mu: pc.mu,
            n: pc.n,
            beta: pc.n + pc.mu,
            eps: pc.eps,
            delta: delta.unwrap_or(0.5),
        };
        problems.extend(params.problems());

        let anchor = match self.regime {
            RegimeConfig::DebtTargeting { a_star, .. } => Some(a_star),
            RegimeConfig::Activist { a_star, .. } => a_star,
        };
        let pi_star = match (self.rule.pi_star, anchor) {
            (Some(p), _) => Some(p),
            (None, Some(a)) if params.problems().is_empty() => {
                match TaylorRule::anchored(&params, self.rule.r_star, self.rule.slope_at_target, a) {
                    Ok(r) => Some(r.pi_star),
                    Err(e) => {
                        problems.push(format!("rule: {e}"));
                        None
                    }
                }
            }
            (None, Some(_)) => None,
            (None, None) => {
                problems.push("rule.pi_star is required when the regime has no a_star".into());
                None
            }
        };
        let rule = TaylorRule {
            pi_star: pi_star.unwrap_or(0.0),
            r_star: self.rule.r_star,
            slope_at_target: self.rule.slope_at_target,
        };
        problems.extend(rule.problems());

        let regime = match self.regime {
            RegimeConfig::DebtTargeting { a_star, phi } => FiscalRegime::DebtTargeting(DebtTargeting { a_star, phi }),
            RegimeConfig::Activist {
                theta0,
                theta1,
                gamma0,
                gamma1,
                a_threshold,
                theta_floor,
                a_star,
            } => {
                let gamma0 = match (gamma0, a_star) {
                    (Some(g), _) => g,
                    (None, Some(a)) => Activist::gamma0_for_target(&params, &rule, theta0, theta1, gamma1, a),
                    (None, None) => {
                        problems.push("regime: give gamma0 or a_star".into());
                        0.0
                    }
                };
                FiscalRegime::Activist(Activist {
                    theta0,
                    theta1,
                    gamma0,
                    gamma1,
                    a_threshold,
                    theta_floor,
                })
            }
        };
        problems.extend(regime.problems());

        if !problems.is_empty() {
            problems.sort();
            problems.dedup();
            return Err(Error::Config(
                problems.iter().map(|p| format!("  - {p}")).collect::<Vec<_>>().join("\n"),
            ));
        }
        Model::new(params, rule, regime)
    }
}
