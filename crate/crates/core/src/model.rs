use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::{FiscalRegime, TaylorRule};
use crate::prefs::{Kernel, ModelParams};

/// A fully specified economy: preferences, monetary rule and fiscal regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub params: ModelParams,
    pub rule: TaylorRule,
    pub regime: FiscalRegime,
}

/// Point `(a, π)` in the phase plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub a: f64,
    pub pi: f64,
}

impl StateVector {
    pub fn new(a: f64, pi: f64) -> Self {
        StateVector { a, pi }
    }

    pub fn dist(&self, other: &StateVector) -> f64 {
        (self.a - other.a).hypot(self.pi - other.pi)
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.a, self.pi]
    }

    pub fn from_array(x: [f64; 2]) -> Self {
        StateVector { a: x[0], pi: x[1] }
    }
}

impl Model {
    pub fn new(params: ModelParams, rule: TaylorRule, regime: FiscalRegime) -> Result<Self> {
        let m = Model {
            params,
            rule,
            regime,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(problems.join("; ")))
        }
    }

    pub(crate) fn problems(&self) -> Vec<String> {
        let mut out = self.params.problems();
        out.extend(self.rule.problems());
        out.extend(self.regime.problems());
        out
    }

    /// Time derivatives `(ȧ, π̇)`.
    ///
    /// `π̇ = [Λ/(Λ'Ψ')](Ψ - π - ρ) - [β(ρ+μ)/(Λ'Ψ')] a`, all functions of
    /// `Ψ(π)`; `ȧ` follows the fiscal regime.
    pub fn vector_field(&self, x: StateVector) -> (f64, f64) {
        let p = &self.params;
        let nominal = self.rule.psi(x.pi);
        let slope = self.rule.psi_prime(x.pi);
        // Ψ > 0 everywhere for the exponential rule; underflow is the only way out.
        let k = match Kernel::at(nominal, p) {
            Ok(k) => k,
            Err(_) => return (f64::NAN, f64::NAN),
        };
        let denom = k.lambda_prime * slope;
        let pi_dot = (k.lambda * (nominal - x.pi - p.rho) - p.wealth_coeff() * x.a) / denom;
        let a_dot = match &self.regime {
            FiscalRegime::DebtTargeting(d) => -d.phi * (x.a - d.a_star),
            FiscalRegime::Activist(act) => {
                let r = nominal - x.pi;
                (r - p.n - act.theta(p, r, x.a)) * x.a - act.gamma(r)
            }
        };
        (a_dot, pi_dot)
    }

    pub fn surplus(&self, x: StateVector) -> f64 {
        crate::policy::surplus(&self.regime, &self.params, &self.rule, x.a, x.pi)
    }
}
