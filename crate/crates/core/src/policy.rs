//! Monetary rule and fiscal regimes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prefs::{lambda_big, ModelParams};

/// Exponential interest-rate feedback rule
/// `Ψ(π) = R* exp[(Ψ'(π*)/R*)(π - π*)]`.
///
/// Positive, increasing and strictly convex on the whole real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorRule {
    pub pi_star: f64,
    pub r_star: f64,
    pub slope_at_target: f64,
}

impl TaylorRule {
    pub fn new(pi_star: f64, r_star: f64, slope_at_target: f64) -> Result<Self> {
        let rule = TaylorRule {
            pi_star,
            r_star,
            slope_at_target,
        };
        let problems = rule.problems();
        if problems.is_empty() {
            Ok(rule)
        } else {
            Err(Error::InvalidParams(problems.join("; ")))
        }
    }

    /// Rule whose target `(a*, π*)` solves the modified Fisher equation,
    /// i.e. `π* = R* - ρ - β(ρ+μ)a*/Λ(R*)`.
    pub fn anchored(
        params: &ModelParams,
        r_star: f64,
        slope_at_target: f64,
        a_star: f64,
    ) -> Result<Self> {
        let lambda = lambda_big(r_star, params)?;
        let pi_star = r_star - params.rho - params.wealth_coeff() * a_star / lambda;
        TaylorRule::new(pi_star, r_star, slope_at_target)
    }

    pub(crate) fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.pi_star.is_finite() {
            out.push("rule.pi_star must be finite".into());
        }
        if !(self.r_star > 0.0 && self.r_star.is_finite()) {
            out.push(format!("rule.r_star must be > 0 (got {})", self.r_star));
        }
        if !(self.slope_at_target > 1.0 && self.slope_at_target.is_finite()) {
            out.push(format!(
                "rule.slope_at_target must exceed 1 (got {})",
                self.slope_at_target
            ));
        }
        out
    }

    fn curvature(&self) -> f64 {
        self.slope_at_target / self.r_star
    }

    pub fn psi(&self, pi: f64) -> f64 {
        self.r_star * (self.curvature() * (pi - self.pi_star)).exp()
    }

    pub fn psi_prime(&self, pi: f64) -> f64 {
        self.curvature() * self.psi(pi)
    }

    pub fn psi_second(&self, pi: f64) -> f64 {
        self.curvature() * self.psi_prime(pi)
    }

    /// Inflation at which `Ψ'(π) = 1`, the turning point of `Ψ(π) - π`.
    pub fn unit_slope_pi(&self) -> f64 {
        self.pi_star + (1.0 / self.slope_at_target).ln() / self.curvature()
    }
}

/// Fiscal rule `ȧ = -φ(a - a*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DebtTargeting {
    pub a_star: f64,
    pub phi: f64,
}

/// Surplus rule `s = Θ(r, a) a + Γ(r)` with `r = Ψ(π) - π`.
///
/// `Θ` and `Γ` are affine in the real rate. Past `a_threshold` the
/// sensitivity `Θ` is floored at `theta_floor` (default `n + 0.01`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Activist {
    pub theta0: f64,
    pub theta1: f64,
    pub gamma0: f64,
    pub gamma1: f64,
    pub a_threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_floor: Option<f64>,
}

impl Activist {
    pub fn floor(&self, params: &ModelParams) -> f64 {
        self.theta_floor.unwrap_or(params.n + 0.01)
    }

    /// Surplus sensitivity to liabilities.
    pub fn theta(&self, params: &ModelParams, r: f64, a: f64) -> f64 {
        let base = self.theta0 + self.theta1 * r;
        if a > self.a_threshold {
            base.max(self.floor(params))
        } else {
            base
        }
    }

    /// `∂Θ/∂r`.
    pub fn theta_prime(&self, params: &ModelParams, r: f64, a: f64) -> f64 {
        if a > self.a_threshold && self.theta0 + self.theta1 * r < self.floor(params) {
            0.0
        } else {
            self.theta1
        }
    }

    pub fn gamma(&self, r: f64) -> f64 {
        self.gamma0 + self.gamma1 * r
    }

    pub fn gamma_prime(&self) -> f64 {
        self.gamma1
    }

    /// Intercept `γ0` placing `(a_star, π*)` on the `ȧ = 0` locus.
    pub fn gamma0_for_target(
        params: &ModelParams,
        rule: &TaylorRule,
        theta0: f64,
        theta1: f64,
        gamma1: f64,
        a_star: f64,
    ) -> f64 {
        let r = rule.r_star - rule.pi_star;
        let theta = theta0 + theta1 * r;
        (r - params.n - theta) * a_star - gamma1 * r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiscalRegime {
    DebtTargeting(DebtTargeting),
    Activist(Activist),
}

impl FiscalRegime {
    pub fn tag(&self) -> &'static str {
        match self {
            FiscalRegime::DebtTargeting(_) => "debt_targeting",
            FiscalRegime::Activist(_) => "activist",
        }
    }

    pub(crate) fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            FiscalRegime::DebtTargeting(d) => {
                if !(d.a_star > 0.0 && d.a_star.is_finite()) {
                    out.push(format!("regime.a_star must be > 0 (got {})", d.a_star));
                }
                if !(d.phi > 0.0 && d.phi.is_finite()) {
                    out.push(format!("regime.phi must be > 0 (got {})", d.phi));
                }
            }
            FiscalRegime::Activist(r) => {
                let fields = [r.theta0, r.theta1, r.gamma0, r.gamma1, r.a_threshold];
                if fields.iter().any(|x| !x.is_finite()) {
                    out.push("regime: activist coefficients must be finite".into());
                }
                if r.theta1 < 0.0 {
                    out.push(format!("regime.theta1 must be >= 0 (got {})", r.theta1));
                }
                if r.gamma1 < 0.0 {
                    out.push(format!("regime.gamma1 must be >= 0 (got {})", r.gamma1));
                }
                if r.a_threshold <= 0.0 {
                    out.push(format!(
                        "regime.a_threshold must be > 0 (got {})",
                        r.a_threshold
                    ));
                }
                if let Some(f) = r.theta_floor {
                    if !f.is_finite() {
                        out.push("regime.theta_floor must be finite".into());
                    }
                }
            }
        }
        out
    }
}

/// Primary surplus relative to output at state `(a, π)`.
pub fn surplus(
    regime: &FiscalRegime,
    params: &ModelParams,
    rule: &TaylorRule,
    a: f64,
    pi: f64,
) -> f64 {
    let nominal = rule.psi(pi);
    match regime {
        FiscalRegime::DebtTargeting(d) => {
            (nominal + d.phi - pi - params.n) * a - d.phi * d.a_star
        }
        FiscalRegime::Activist(act) => {
            let r = nominal - pi;
            act.theta(params, r, a) * a + act.gamma(r)
        }
    }
}
