//! Linearized dynamics around steady states.
//!
//! Analytic Jacobians for both fiscal regimes, closed-form 2x2 spectral
//! analysis, saddle-path and unstable-branch slopes, comparative statics of
//! the debt target and the activist determinacy conditions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;
use crate::policy::{Activist, DebtTargeting, FiscalRegime};
use crate::prefs::{omega, Kernel};
use crate::steady::{solve_debt_targeting, ScanOptions, SteadyState};

/// Discriminants with magnitude below this are treated as repeated roots.
pub const DEGENERACY_BAND: f64 = 1e-14;

/// `[[∂ȧ/∂a, ∂ȧ/∂π], [∂π̇/∂a, ∂π̇/∂π]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jacobian2 {
    pub j11: f64,
    pub j12: f64,
    pub j21: f64,
    pub j22: f64,
}

impl Jacobian2 {
    pub fn new(j11: f64, j12: f64, j21: f64, j22: f64) -> Self {
        Jacobian2 { j11, j12, j21, j22 }
    }

    pub fn trace(&self) -> f64 {
        self.j11 + self.j22
    }

    pub fn det(&self) -> f64 {
        self.j11 * self.j22 - self.j12 * self.j21
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.j11 * v[0] + self.j12 * v[1],
            self.j21 * v[0] + self.j22 * v[1],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Saddle,
    StableNode,
    UnstableNode,
    StableSpiral,
    UnstableSpiral,
    Degenerate,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::Saddle => "saddle",
            Classification::StableNode => "stable node",
            Classification::UnstableNode => "unstable node",
            Classification::StableSpiral => "stable spiral",
            Classification::UnstableSpiral => "unstable spiral",
            Classification::Degenerate => "degenerate",
        }
    }

    pub fn is_spiral(&self) -> bool {
        matches!(self, Classification::StableSpiral | Classification::UnstableSpiral)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Eigenvalues {
    /// Ascending.
    Real { low: f64, high: f64 },
    Complex { re: f64, im: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub trace: f64,
    pub determinant: f64,
    pub discriminant: f64,
    pub eigenvalues: Eigenvalues,
    /// Unit eigenvectors `[v_low, v_high]`, present for distinct real roots.
    pub eigenvectors: Option<[[f64; 2]; 2]>,
    pub classification: Classification,
}

impl EigenReport {
    pub fn real_pair(&self) -> Option<(f64, f64)> {
        match self.eigenvalues {
            Eigenvalues::Real { low, high } => Some((low, high)),
            Eigenvalues::Complex { .. } => None,
        }
    }

    /// Eigenvector slope `dπ/da` for the low or high root.
    pub fn slope(&self, high: bool) -> Option<f64> {
        self.eigenvectors.map(|v| {
            let e = v[high as usize];
            e[1] / e[0]
        })
    }
}

fn unit_eigenvector(j: &Jacobian2, lambda: f64) -> [f64; 2] {
    // Two candidate null vectors of (J - λI); take the better conditioned.
    let r1 = [j.j12, lambda - j.j11];
    let r2 = [lambda - j.j22, j.j21];
    let n1 = r1[0].hypot(r1[1]);
    let n2 = r2[0].hypot(r2[1]);
    let (v, n) = if n1 >= n2 { (r1, n1) } else { (r2, n2) };
    if n == 0.0 {
        // J = λI on this root; any direction works.
        return [1.0, 0.0];
    }
    let mut v = [v[0] / n, v[1] / n];
    if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
        v = [-v[0], -v[1]];
    }
    v
}

/// Closed-form spectral analysis of a 2x2 matrix.
pub fn eigen2(j: &Jacobian2) -> EigenReport {
    let trace = j.trace();
    let det = j.det();
    let disc = trace * trace - 4.0 * det;

    let classification = if det < 0.0 {
        Classification::Saddle
    } else if disc.abs() < DEGENERACY_BAND || det == 0.0 {
        Classification::Degenerate
    } else if disc > 0.0 {
        if trace < 0.0 {
            Classification::StableNode
        } else {
            Classification::UnstableNode
        }
    } else if trace < 0.0 {
        Classification::StableSpiral
    } else if trace > 0.0 {
        Classification::UnstableSpiral
    } else {
        Classification::Degenerate
    };

    let (eigenvalues, eigenvectors) = if disc >= 0.0 || classification == Classification::Degenerate && disc > -DEGENERACY_BAND {
        let root = disc.max(0.0).sqrt();
        // λ² - tr λ + det = 0, cancellation-free
        let q = 0.5 * (trace + trace.signum() * root);
        let (l1, l2) = if q != 0.0 {
            (q, det / q)
        } else {
            (0.5 * root, -0.5 * root)
        };
        let (low, high) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
        let vectors = if classification == Classification::Degenerate {
            None
        } else {
            Some([unit_eigenvector(j, low), unit_eigenvector(j, high)])
        };
        (Eigenvalues::Real { low, high }, vectors)
    } else {
        (
            Eigenvalues::Complex {
                re: 0.5 * trace,
                im: 0.5 * (-disc).sqrt(),
            },
            None,
        )
    };

    EigenReport {
        trace,
        determinant: det,
        discriminant: disc,
        eigenvalues,
        eigenvectors,
        classification,
    }
}

/// Rule and kernel values at a point, shared by the Jacobian formulas.
#[derive(Debug, Clone, Copy)]
struct Local {
    nominal: f64,
    slope: f64,
    lambda: f64,
    lambda_prime: f64,
    wealth: f64,
}

impl Local {
    fn at(model: &Model, pi: f64) -> Result<Self> {
        let nominal = model.rule.psi(pi);
        let k = Kernel::at(nominal, &model.params)?;
        Ok(Local {
            nominal,
            slope: model.rule.psi_prime(pi),
            lambda: k.lambda,
            lambda_prime: k.lambda_prime,
            wealth: model.params.wealth_coeff(),
        })
    }

    /// `Λ'(Ψ) Ψ'`.
    fn lp_sp(&self) -> f64 {
        self.lambda_prime * self.slope
    }

    /// `∂π̇/∂π` at a point on the `π̇ = 0` locus.
    fn pi_pi(&self, a: f64) -> f64 {
        (self.slope - 1.0) * self.lambda / self.lp_sp() + self.wealth * a / self.lambda
    }

    /// `∂π̇/∂a`.
    fn pi_a(&self) -> f64 {
        -self.wealth / self.lp_sp()
    }
}

fn debt_regime(model: &Model) -> Result<&DebtTargeting> {
    match &model.regime {
        FiscalRegime::DebtTargeting(d) => Ok(d),
        FiscalRegime::Activist(_) => Err(Error::Domain(
            "operation requires the debt-targeting regime".into(),
        )),
    }
}

fn activist_regime(model: &Model) -> Result<&Activist> {
    match &model.regime {
        FiscalRegime::Activist(a) => Ok(a),
        FiscalRegime::DebtTargeting(_) => Err(Error::Domain(
            "operation requires the activist regime".into(),
        )),
    }
}

/// Lower-triangular Jacobian `J` of the debt-targeting system.
pub fn jacobian_debt(model: &Model, ss: &SteadyState) -> Result<Jacobian2> {
    let d = debt_regime(model)?;
    let l = Local::at(model, ss.pi)?;
    Ok(Jacobian2::new(-d.phi, 0.0, l.pi_a(), l.pi_pi(d.a_star)))
}

/// Jacobian `K` of the activist system.
pub fn jacobian_activist(model: &Model, ss: &SteadyState) -> Result<Jacobian2> {
    let act = activist_regime(model)?;
    let l = Local::at(model, ss.pi)?;
    let p = &model.params;
    let r = l.nominal - ss.pi;
    let theta = act.theta(p, r, ss.a);
    let theta_prime = act.theta_prime(p, r, ss.a);
    let k11 = r - p.n - theta;
    let k12 = (l.slope - 1.0) * (ss.a - theta_prime * ss.a - act.gamma_prime());
    Ok(Jacobian2::new(k11, k12, l.pi_a(), l.pi_pi(ss.a)))
}

pub fn jacobian(model: &Model, ss: &SteadyState) -> Result<Jacobian2> {
    match model.regime {
        FiscalRegime::DebtTargeting(_) => jacobian_debt(model, ss),
        FiscalRegime::Activist(_) => jacobian_activist(model, ss),
    }
}

/// Determinant and trace of `K` written out term by term.
pub fn activist_det_trace(model: &Model, ss: &SteadyState) -> Result<(f64, f64)> {
    let act = activist_regime(model)?;
    let l = Local::at(model, ss.pi)?;
    let p = &model.params;
    let r = l.nominal - ss.pi;
    let k11 = r - p.n - act.theta(p, r, ss.a);
    let k22 = l.pi_pi(ss.a);
    let bracket = ss.a - act.theta_prime(p, r, ss.a) * ss.a - act.gamma_prime();
    let det = k11 * k22 + l.wealth / l.lp_sp() * (l.slope - 1.0) * bracket;
    Ok((det, k11 + k22))
}

/// Slope `dπ/da` of the stable arm through a saddle steady state, from the
/// closed-form expressions of each regime.
pub fn saddle_arm_slope(model: &Model, ss: &SteadyState) -> Result<f64> {
    let jac = jacobian(model, ss)?;
    let eig = eigen2(&jac);
    if eig.classification != Classification::Saddle {
        return Err(Error::NotASaddle(eig.classification.to_string()));
    }
    let l = Local::at(model, ss.pi)?;
    match &model.regime {
        FiscalRegime::DebtTargeting(d) => Ok(l.wealth / (l.lp_sp() * (d.phi + jac.j22))),
        FiscalRegime::Activist(_) => {
            let (stable, _) = eig.real_pair().expect("saddle has real roots");
            Ok(branch_slope(&l, stable, jac.j22))
        }
    }
}

/// `-β(ρ+μ) / [Λ'Ψ'(λ - K22)]`: slope of the eigendirection of `λ`.
fn branch_slope(l: &Local, lambda: f64, k22: f64) -> f64 {
    -l.wealth / (l.lp_sp() * (lambda - k22))
}

/// Eigendirection slope for an arbitrary eigenvalue at `ss`.
pub fn eigen_branch_slope(model: &Model, ss: &SteadyState, lambda: f64) -> Result<f64> {
    let l = Local::at(model, ss.pi)?;
    let k22 = jacobian(model, ss)?.j22;
    Ok(branch_slope(&l, lambda, k22))
}

/// Slope of the non-dominant unstable eigendirection at an unstable node.
pub fn unstable_branch_slope(model: &Model, ss_trap: &SteadyState, eigen: &EigenReport) -> Result<f64> {
    if eigen.classification != Classification::UnstableNode {
        return Err(Error::WrongClassification(format!(
            "unstable branch needs an unstable node, got {}",
            eigen.classification
        )));
    }
    let (eta1, _) = eigen.real_pair().expect("node has real roots");
    eigen_branch_slope(model, ss_trap, eta1)
}

/// Long-run and impact responses of inflation to the debt target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparativeStatics {
    /// `dπ*/da*`.
    pub long_run: f64,
    /// `dπ(0)⁺/da*`.
    pub impact: f64,
    /// `da(0)⁺/dπ(0)⁺` implied by the predetermined nominal ratio.
    pub a0_response: f64,
    /// Residual of the implicit impact relation at the returned values.
    pub implicit_residual: f64,
}

/// Responses to a change in `a*` evaluated at the target steady state.
///
/// `nominal_ratio` is the predetermined `A(0)/M(0)`; the initial state sits
/// at the old target, so `π(0) = π*`.
pub fn comparative_statics(model: &Model, target: &SteadyState, nominal_ratio: f64) -> Result<ComparativeStatics> {
    let d = debt_regime(model)?;
    if !(nominal_ratio > 0.0) {
        return Err(Error::Domain(format!(
            "A(0)/M(0) must be > 0 (got {nominal_ratio})"
        )));
    }
    let l = Local::at(model, target.pi)?;
    let j22 = l.pi_pi(d.a_star);
    let long_run = l.wealth / (l.lp_sp() * j22);
    let arm = l.wealth / (l.lp_sp() * (d.phi + j22));

    // a(0) = (A0/M0) / Ω(Ψ(π(0))), Ω'(R) = ε Ω(R) / R
    let om = omega(l.nominal, &model.params)?;
    let om_prime = model.params.eps * om / l.nominal;
    let a0_response = -nominal_ratio * om_prime * l.slope / (om * om);

    let impact = l.wealth * d.phi / (l.lp_sp() * j22 * (d.phi + j22)) / (1.0 - arm * a0_response);
    let implicit_residual = impact - (long_run + arm * (a0_response * impact - 1.0));
    Ok(ComparativeStatics {
        long_run,
        impact,
        a0_response,
        implicit_residual,
    })
}

/// Long-run response recomputed by re-solving the Fisher equation at
/// `a* ± h`.
pub fn long_run_by_resolve(model: &Model, h: f64, opts: &ScanOptions) -> Result<f64> {
    let d = debt_regime(model)?;
    let solve = |a_star: f64| -> Result<f64> {
        let shifted = DebtTargeting { a_star, phi: d.phi };
        Ok(solve_debt_targeting(&model.params, &model.rule, &shifted, opts)?[1].pi)
    };
    Ok((solve(d.a_star + h)? - solve(d.a_star - h)?) / (2.0 * h))
}

/// One displayed inequality `lhs ≷ rhs`, with `holds` and `margin`
/// oriented so that a positive margin means the inequality holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub margin: f64,
}

impl Predicate {
    fn greater(lhs: f64, rhs: f64) -> Self {
        Predicate {
            lhs,
            rhs,
            holds: lhs > rhs,
            margin: lhs - rhs,
        }
    }

    fn less(lhs: f64, rhs: f64) -> Self {
        Predicate {
            lhs,
            rhs,
            holds: lhs < rhs,
            margin: rhs - lhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActivistConditions {
    /// `det K < 0` at the target: local determinacy.
    pub target_determinacy: Predicate,
    /// `det K > 0` at the trap.
    pub trap_det_positive: Predicate,
    /// `tr K > 0` at the trap.
    pub trap_trace_positive: Predicate,
    /// Real roots at the trap (holds) versus complex roots (fails).
    pub trap_real_roots: Predicate,
    pub predicted_target_saddle: bool,
    pub predicted_trap: Classification,
    pub target_eigen: EigenReport,
    pub trap_eigen: EigenReport,
}

impl ActivistConditions {
    /// Predicates agree with the spectra of both Jacobians.
    pub fn consistent(&self) -> bool {
        let target_ok =
            self.predicted_target_saddle == (self.target_eigen.classification == Classification::Saddle);
        target_ok && self.predicted_trap == self.trap_eigen.classification
    }
}

/// Evaluates the activist determinacy and instability conditions as
/// inequalities on `Γ'`, `Θ'` and `Θ`.
pub fn activist_conditions(model: &Model, target: &SteadyState, trap: &SteadyState) -> Result<ActivistConditions> {
    let act = activist_regime(model)?;
    let p = &model.params;
    let w = p.wealth_coeff();

    let parts = |ss: &SteadyState| -> Result<(Local, f64, f64, f64, f64)> {
        let l = Local::at(model, ss.pi)?;
        let r = l.nominal - ss.pi;
        let k11 = r - p.n - act.theta(p, r, ss.a);
        let k22 = l.pi_pi(ss.a);
        let activism = act.gamma_prime() + act.theta_prime(p, r, ss.a) * ss.a;
        Ok((l, r, k11, k22, activism))
    };

    let (lt, _, k11t, k22t, act_t) = parts(target)?;
    let target_determinacy = Predicate::greater(
        act_t,
        target.a + k11t * lt.lp_sp() * k22t / (w * (lt.slope - 1.0)),
    );

    let (ll, rl, k11l, k22l, act_l) = parts(trap)?;
    let passive = w * (1.0 - ll.slope);
    let det_rhs = trap.a + k11l * ll.lp_sp() * (-k22l) / passive;
    let trap_det_positive = Predicate::greater(act_l, det_rhs);
    let trap_trace_positive = Predicate::less(
        act.theta(p, rl, trap.a),
        p.rho - p.n + w * trap.a / ll.lambda + k22l,
    );
    let tr = k11l + k22l;
    let trap_real_roots = Predicate::less(act_l, det_rhs + ll.lp_sp() * tr * tr / (4.0 * passive));

    let predicted_trap = if !trap_det_positive.holds {
        Classification::Saddle
    } else {
        match (trap_trace_positive.holds, trap_real_roots.holds) {
            (true, true) => Classification::UnstableNode,
            (true, false) => Classification::UnstableSpiral,
            (false, true) => Classification::StableNode,
            (false, false) => Classification::StableSpiral,
        }
    };

    Ok(ActivistConditions {
        target_determinacy,
        trap_det_positive,
        trap_trace_positive,
        trap_real_roots,
        predicted_target_saddle: target_determinacy.holds,
        predicted_trap,
        target_eigen: eigen2(&jacobian_activist(model, target)?),
        trap_eigen: eigen2(&jacobian_activist(model, trap)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_degenerate() {
        let e = eigen2(&Jacobian2::new(1.0, 0.0, 0.0, 1.0));
        assert_eq!(e.classification, Classification::Degenerate);
        assert_eq!(e.eigenvalues, Eigenvalues::Real { low: 1.0, high: 1.0 });
        assert!(e.eigenvectors.is_none());
    }

    #[test]
    fn triangular_eigenvalues() {
        for x in [-3.0, 0.0, 0.7] {
            let e = eigen2(&Jacobian2::new(-0.05, 0.0, x, 0.88));
            let (lo, hi) = e.real_pair().unwrap();
            assert!((lo + 0.05).abs() < 1e-15);
            assert!((hi - 0.88).abs() < 1e-15);
            assert_eq!(e.classification, Classification::Saddle);
        }
    }

    #[test]
    fn classification_sign_patterns() {
        let cases = [
            (Jacobian2::new(-1.0, 0.0, 0.0, -2.0), Classification::StableNode),
            (Jacobian2::new(1.0, 0.0, 0.0, 2.0), Classification::UnstableNode),
            (Jacobian2::new(-0.1, 1.0, -1.0, -0.1), Classification::StableSpiral),
            (Jacobian2::new(0.1, 1.0, -1.0, 0.1), Classification::UnstableSpiral),
            (Jacobian2::new(0.0, 1.0, -1.0, 0.0), Classification::Degenerate),
            (Jacobian2::new(1.0, 2.0, 3.0, 1.0), Classification::Saddle),
        ];
        for (j, c) in cases {
            assert_eq!(eigen2(&j).classification, c, "{j:?}");
        }
    }

    #[test]
    fn complex_pair() {
        let e = eigen2(&Jacobian2::new(0.1, 1.0, -1.0, 0.1));
        match e.eigenvalues {
            Eigenvalues::Complex { re, im } => {
                assert!((re - 0.1).abs() < 1e-15);
                assert!((im - 1.0).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn eigenvectors_satisfy_definition() {
        let j = Jacobian2::new(0.3, -1.2, 0.4, -2.0);
        let e = eigen2(&j);
        let (lo, hi) = e.real_pair().unwrap();
        let v = e.eigenvectors.unwrap();
        for (lam, vec) in [(lo, v[0]), (hi, v[1])] {
            let jv = j.apply(vec);
            assert!((jv[0] - lam * vec[0]).abs() < 1e-13);
            assert!((jv[1] - lam * vec[1]).abs() < 1e-13);
        }
    }
}
