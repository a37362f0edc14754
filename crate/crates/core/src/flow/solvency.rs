use serde::{Deserialize, Serialize};

use super::trajectory::{TerminalStatus, Trajectory};
use crate::model::{Model, StateVector};
use crate::policy::FiscalRegime;

/// Discounting and budget-constraint diagnostics along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvencyReport {
    /// `D(t) = a(t) exp(-∫(R - π - n))` at every sample.
    pub discounted: Vec<f64>,
    pub discounted_terminal: f64,
    /// `∫₀ᵀ s e^{-∫(R-π-n)} dt`.
    pub surplus_pv: f64,
    /// Present value of surpluses beyond the last sample at terminal values.
    pub tail: f64,
    /// `a(0) - surplus_pv - tail`.
    pub ibc_residual: f64,
    /// `∫₀ᵀ Θ dt` for the surplus sensitivity in force along the path.
    pub theta_integral: f64,
    /// Earliest time after which the running `∫Θ` stays positive.
    pub theta_positive_from: Option<f64>,
    /// Set when the trajectory escaped or the tail could not be continued.
    pub truncated: bool,
}

/// Sensitivity of the surplus to liabilities at a state.
fn theta_at(model: &Model, x: StateVector) -> f64 {
    let p = &model.params;
    let nominal = model.rule.psi(x.pi);
    match &model.regime {
        FiscalRegime::DebtTargeting(d) => nominal + d.phi - x.pi - p.n,
        FiscalRegime::Activist(act) => act.theta(p, nominal - x.pi, x.a),
    }
}

pub fn solvency_report(tr: &Trajectory, model: &Model) -> SolvencyReport {
    let n = tr.len();
    let growth: Vec<f64> = (0..n).map(|i| tr.nominal_rate[i] - tr.pi[i] - model.params.n).collect();
    let mut discounted = Vec::with_capacity(n);
    let mut log_disc = 0.0;
    let mut pv = 0.0;
    let mut theta_int = 0.0;
    let mut theta_positive_from = None;
    let mut prev_integrand = 0.0;
    let mut prev_theta = 0.0;
    for i in 0..n {
        let theta = theta_at(model, tr.state(i));
        if i > 0 {
            let dt = tr.t[i] - tr.t[i - 1];
            log_disc += 0.5 * dt * (growth[i] + growth[i - 1]);
            theta_int += 0.5 * dt * (theta + prev_theta);
        }
        let disc = (-log_disc).exp();
        let integrand = tr.s[i] * disc;
        if i > 0 {
            pv += 0.5 * (tr.t[i] - tr.t[i - 1]) * (integrand + prev_integrand);
        }
        if theta_int > 0.0 {
            theta_positive_from.get_or_insert(tr.t[i]);
        } else if i > 0 {
            theta_positive_from = None;
        }
        prev_integrand = integrand;
        prev_theta = theta;
        discounted.push(tr.a[i] * disc);
    }

    let mut truncated = !matches!(tr.status, TerminalStatus::Converged { .. } | TerminalStatus::Horizon);
    let tail = match (n, growth.last()) {
        (0, _) | (_, None) => 0.0,
        (_, Some(&g)) if g > 0.0 => prev_integrand / g,
        _ => {
            truncated = true;
            0.0
        }
    };
    let a0 = tr.a.first().copied().unwrap_or(0.0);
    SolvencyReport {
        discounted_terminal: discounted.last().copied().unwrap_or(0.0),
        discounted,
        surplus_pv: pv,
        tail,
        ibc_residual: a0 - pv - tail,
        theta_integral: theta_int,
        theta_positive_from,
        truncated,
    }
}
