//! Named parameterizations and the activist-regime grid search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localdyn::{activist_conditions, ActivistConditions, Classification, Eigenvalues};
use crate::model::Model;
use crate::policy::{Activist, DebtTargeting, FiscalRegime, TaylorRule};
use crate::prefs::{calibrate_delta, ModelParams};
use crate::steady::{trap_and_target, ScanOptions, SteadyState};

pub const BASE_RHO: f64 = 0.04;
pub const BASE_MU: f64 = 0.012366;
pub const BASE_N: f64 = 0.0047;
pub const R_STAR: f64 = 0.06;
pub const A_STAR: f64 = 0.6;

/// Debt targeting at the baseline demographics with a rule slope of 1.5.
pub fn figure1() -> Result<Model> {
    let eps = 0.6;
    let delta = calibrate_delta(1.0, R_STAR, eps)?;
    let params = ModelParams::new(BASE_RHO, BASE_MU, BASE_N, eps, delta)?;
    let rule = TaylorRule::anchored(&params, R_STAR, 1.5, A_STAR)?;
    Model::new(
        params,
        rule,
        FiscalRegime::DebtTargeting(DebtTargeting {
            a_star: A_STAR,
            phi: 2.0,
        }),
    )
}

/// Fixed ingredients of the activist search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActivistBase {
    pub rho: f64,
    pub mu: f64,
    pub n: f64,
    pub eps: f64,
    pub velocity: f64,
    pub r_star: f64,
    pub slope_at_target: f64,
    pub a_star: f64,
    pub theta0: f64,
    pub a_threshold: f64,
}

impl Default for ActivistBase {
    /// A high turnover rate makes the wealth effect strong enough for a
    /// connecting orbit at moderate surplus feedback.
    fn default() -> Self {
        ActivistBase {
            rho: BASE_RHO,
            mu: 0.1,
            n: BASE_N,
            eps: 0.6,
            velocity: 0.3,
            r_star: R_STAR,
            slope_at_target: 1.2,
            a_star: A_STAR,
            theta0: -1.0,
            a_threshold: 5.0,
        }
    }
}

impl ActivistBase {
    pub fn params(&self) -> Result<ModelParams> {
        let delta = calibrate_delta(self.velocity, self.r_star, self.eps)?;
        ModelParams::new(self.rho, self.mu, self.n, self.eps, delta)
    }

    /// Model with `γ0` chosen so that `(a*, π*)` is a steady state.
    pub fn model(&self, theta1: f64, gamma1: f64) -> Result<Model> {
        let params = self.params()?;
        let rule = TaylorRule::anchored(&params, self.r_star, self.slope_at_target, self.a_star)?;
        let gamma0 = Activist::gamma0_for_target(&params, &rule, self.theta0, theta1, gamma1, self.a_star);
        Model::new(
            params,
            rule,
            FiscalRegime::Activist(Activist {
                theta0: self.theta0,
                theta1,
                gamma0,
                gamma1,
                a_threshold: self.a_threshold,
                theta_floor: None,
            }),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrapKind {
    Node,
    Spiral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchGrid {
    pub theta1: Vec<f64>,
    pub gamma1_min: f64,
    pub gamma1_max: f64,
    pub gamma1_points: usize,
    /// Spiral candidates need `Im/Re` at least this large at the trap.
    pub min_rotation: f64,
}

impl Default for SearchGrid {
    fn default() -> Self {
        SearchGrid {
            theta1: vec![0.0, 0.25, 0.5, 1.0],
            gamma1_min: 10.0,
            gamma1_max: 1e4,
            gamma1_points: 121,
            min_rotation: 3.0,
        }
    }
}

impl SearchGrid {
    pub fn gamma1_values(&self) -> Vec<f64> {
        let (lo, hi) = (self.gamma1_min.ln(), self.gamma1_max.ln());
        let n = self.gamma1_points.max(2);
        (0..n).map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub theta1: f64,
    pub gamma1: f64,
    pub model: Model,
    pub trap: SteadyState,
    pub target: SteadyState,
    pub conditions: ActivistConditions,
}

impl Candidate {
    /// `4 det / tr²` at the trap; below one on the real-root side.
    pub fn det_trace_ratio(&self) -> f64 {
        let e = &self.conditions.trap_eigen;
        4.0 * e.determinant / (e.trace * e.trace)
    }

    pub fn rotation(&self) -> f64 {
        match self.conditions.trap_eigen.eigenvalues {
            Eigenvalues::Complex { re, im } => im / re.abs(),
            Eigenvalues::Real { .. } => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub chosen: Candidate,
    pub evaluated: usize,
    pub admissible: usize,
    /// Grid points whose predicates disagreed with the spectra.
    pub mismatches: usize,
}

fn evaluate(base: &ActivistBase, theta1: f64, gamma1: f64) -> Option<Candidate> {
    let model = base.model(theta1, gamma1).ok()?;
    let (trap, target) = trap_and_target(&model, &ScanOptions::default()).ok()?;
    if (target.a - base.a_star).abs() > 1e-9 {
        return None;
    }
    let conditions = activist_conditions(&model, &target, &trap).ok()?;
    Some(Candidate {
        theta1,
        gamma1,
        model,
        trap,
        target,
        conditions,
    })
}

/// Scans `(θ1, γ1)` for a parameterization with a saddle target and an
/// unstable trap of the requested kind.
///
/// Node: all four conditions hold; the candidate whose `4det/tr²` is
/// closest to 1/2 is returned. Spiral: target determinacy, positive
/// determinant and trace at the trap with complex roots; the smallest `γ1`
/// reaching `min_rotation` is returned.
pub fn search_activist(base: &ActivistBase, kind: TrapKind, grid: &SearchGrid) -> Result<SearchOutcome> {
    let mut evaluated = 0;
    let mut admissible = 0;
    let mut mismatches = 0;
    let mut chosen: Option<Candidate> = None;
    for &theta1 in &grid.theta1 {
        for gamma1 in grid.gamma1_values() {
            evaluated += 1;
            let Some(c) = evaluate(base, theta1, gamma1) else {
                continue;
            };
            let cond = &c.conditions;
            if !cond.consistent() {
                mismatches += 1;
            }
            let unstable_trap = cond.trap_det_positive.holds && cond.trap_trace_positive.holds;
            let ok = cond.target_determinacy.holds
                && unstable_trap
                && c.trap.a > 0.0
                && cond.consistent()
                && match kind {
                    TrapKind::Node => {
                        cond.trap_real_roots.holds
                            && cond.trap_eigen.classification == Classification::UnstableNode
                    }
                    TrapKind::Spiral => {
                        !cond.trap_real_roots.holds
                            && cond.trap_eigen.classification == Classification::UnstableSpiral
                            && c.rotation() >= grid.min_rotation
                    }
                };
            if !ok {
                continue;
            }
            admissible += 1;
            let better = match (&chosen, kind) {
                (None, _) => true,
                (Some(best), TrapKind::Node) => {
                    (c.det_trace_ratio() - 0.5).abs() < (best.det_trace_ratio() - 0.5).abs()
                }
                (Some(best), TrapKind::Spiral) => c.gamma1 < best.gamma1,
            };
            if better {
                chosen = Some(c);
            }
        }
    }
    let chosen = chosen.ok_or_else(|| {
        Error::NoConnection(format!(
            "no admissible {kind:?} parameterization among {evaluated} grid points"
        ))
    })?;
    Ok(SearchOutcome {
        chosen,
        evaluated,
        admissible,
        mismatches,
    })
}

/// Activist regime whose trap is an unstable node.
pub fn figure2() -> Result<Model> {
    Ok(search_activist(&ActivistBase::default(), TrapKind::Node, &SearchGrid::default())?
        .chosen
        .model)
}

/// Activist regime whose trap is an unstable spiral.
pub fn figure3() -> Result<Model> {
    Ok(search_activist(&ActivistBase::default(), TrapKind::Spiral, &SearchGrid::default())?
        .chosen
        .model)
}
