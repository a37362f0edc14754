//! Steady states by scan-and-bisect on the modified Fisher equation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Model, StateVector};
use crate::policy::{Activist, DebtTargeting, FiscalRegime, TaylorRule};
use crate::prefs::{lambda_big, ModelParams};

/// Fixed point of the phase-plane dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub a: f64,
    pub pi: f64,
    #[serde(rename = "R")]
    pub nominal_rate: f64,
    pub regime_tag: String,
    pub residual: f64,
}

impl SteadyState {
    pub fn state(&self) -> StateVector {
        StateVector::new(self.a, self.pi)
    }
}

/// Scan window and resolution for the bracketing pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// How far below `π*` the scan reaches.
    pub below: f64,
    /// How far above `π*` the scan reaches.
    pub above: f64,
    pub step: f64,
    /// Bisection stops once the bracket is narrower than this.
    pub pi_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            below: 0.25,
            above: 0.10,
            step: 1e-3,
            pi_tol: 1e-13,
        }
    }
}

/// `Ψ(π) - π - ρ - β(ρ+μ)a/Λ(Ψ(π))`.
pub fn fisher_residual(pi: f64, a: f64, params: &ModelParams, rule: &TaylorRule) -> Result<f64> {
    let nominal = rule.psi(pi);
    let lambda = lambda_big(nominal, params)?;
    Ok(nominal - pi - params.rho - params.wealth_coeff() * a / lambda)
}

fn scan_grid(rule: &TaylorRule, opts: &ScanOptions) -> Vec<f64> {
    let lo = rule.pi_star - opts.below;
    let count = ((opts.below + opts.above) / opts.step).round() as usize;
    (0..=count).map(|i| lo + i as f64 * opts.step).collect()
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const JUMP_REJECT: f64 = 1e-6;

/// Bracketed roots of `f` over the grid, ascending.
fn scan_roots<F: Fn(f64) -> f64>(f: &F, grid: &[f64], tol: f64) -> Vec<f64> {
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for i in 0..grid.len() - 1 {
        let (f0, f1) = (values[i], values[i + 1]);
        if !(f0.is_finite() && f1.is_finite()) {
            continue;
        }
        if f0 == 0.0 {
            roots.push(grid[i]);
        } else if f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
            let r = bisect(f, grid[i], grid[i + 1], tol);
            // A sign flip across a jump (branch switch of the locus) leaves
            // a residual of the size of the jump.
            if f(r).abs() <= JUMP_REJECT * f0.abs().max(f1.abs()) {
                roots.push(r);
            }
        }
    }
    if values.last() == Some(&0.0) {
        roots.push(*grid.last().unwrap());
    }
    roots
}

fn check_count(roots: &[f64]) -> Result<()> {
    match roots.len() {
        2 => Ok(()),
        n if n < 2 => Err(Error::NoLowSteadyState { found: n }),
        _ => Err(Error::MultipleRootsDetected {
            roots: roots.to_vec(),
        }),
    }
}

fn finish(model: &Model, a: f64, pi: f64) -> SteadyState {
    let (a_dot, pi_dot) = model.vector_field(StateVector::new(a, pi));
    let fisher = fisher_residual(pi, a, &model.params, &model.rule).unwrap_or(f64::NAN);
    SteadyState {
        a,
        pi,
        nominal_rate: model.rule.psi(pi),
        regime_tag: model.regime.tag().to_string(),
        residual: a_dot.abs().max(pi_dot.abs()).max(fisher.abs()),
    }
}

/// Both steady states under debt targeting, ascending in `π`: `(a*, π^L)`
/// then `(a*, π*)`.
pub fn solve_debt_targeting(
    params: &ModelParams,
    rule: &TaylorRule,
    regime: &DebtTargeting,
    opts: &ScanOptions,
) -> Result<Vec<SteadyState>> {
    if !(regime.a_star > 0.0) {
        return Err(Error::Domain(format!(
            "a_star must be > 0 (got {})",
            regime.a_star
        )));
    }
    let f = |pi: f64| fisher_residual(pi, regime.a_star, params, rule).unwrap_or(f64::NAN);
    let roots = scan_roots(&f, &scan_grid(rule, opts), opts.pi_tol);
    check_count(&roots)?;
    let model = Model {
        params: *params,
        rule: *rule,
        regime: FiscalRegime::DebtTargeting(*regime),
    };
    Ok(roots
        .into_iter()
        .map(|pi| finish(&model, regime.a_star, pi))
        .collect())
}

pub(crate) fn activist_denominator(params: &ModelParams, rule: &TaylorRule, act: &Activist, pi: f64) -> f64 {
    let r = rule.psi(pi) - pi;
    r - params.n - (act.theta0 + act.theta1 * r)
}

/// Liabilities on the `ȧ = 0` locus at inflation `π`.
///
/// Uses the affine branch of `Θ`; when that places `a` past the threshold
/// the floored branch is tried, and `NaN` is returned if neither branch is
/// self-consistent.
pub fn a_dot_locus(params: &ModelParams, rule: &TaylorRule, act: &Activist, pi: f64) -> f64 {
    let r = rule.psi(pi) - pi;
    let gamma = act.gamma(r);
    let a = gamma / (r - params.n - (act.theta0 + act.theta1 * r));
    if a <= act.a_threshold {
        return a;
    }
    let floored = gamma / (r - params.n - act.theta(params, r, f64::INFINITY));
    if floored > act.a_threshold {
        floored
    } else {
        f64::NAN
    }
}

/// Steady states under the activist regime, ascending in `π`.
pub fn solve_activist(
    params: &ModelParams,
    rule: &TaylorRule,
    regime: &Activist,
    opts: &ScanOptions,
) -> Result<Vec<SteadyState>> {
    let grid = scan_grid(rule, opts);
    let locus = |pi: f64| a_dot_locus(params, rule, regime, pi);
    let f = |pi: f64| {
        let a = locus(pi);
        fisher_residual(pi, a, params, rule).unwrap_or(f64::NAN)
    };
    let denom = |pi: f64| activist_denominator(params, rule, regime, pi);

    let mut roots = Vec::new();
    for w in grid.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (d_lo, d_hi) = (denom(lo), denom(hi));
        if (d_lo < 0.0) != (d_hi < 0.0) {
            // A pole of a(π) sits in this cell: split at it and scan both halves.
            let pole = bisect(&denom, lo, hi, opts.pi_tol);
            let gap = 1e3 * opts.pi_tol;
            for (a, b) in [(lo, pole - gap), (pole + gap, hi)] {
                if b > a {
                    roots.extend(scan_roots(&f, &[a, b], opts.pi_tol));
                }
            }
            if roots.iter().any(|r| (r - pole).abs() <= gap) {
                return Err(Error::SingularBranch { pi: pole });
            }
        } else {
            let found = scan_roots(&f, &[lo, hi], opts.pi_tol);
            for r in found {
                // shared grid endpoints can report the same exact zero twice
                if roots.last().is_none_or(|&prev: &f64| (r - prev).abs() > opts.pi_tol) {
                    roots.push(r);
                }
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    check_count(&roots)?;

    let model = Model {
        params: *params,
        rule: *rule,
        regime: FiscalRegime::Activist(*regime),
    };
    let mut out = Vec::with_capacity(roots.len());
    for pi in roots {
        let a = locus(pi);
        if !(a > 0.0) {
            return Err(Error::NonpositiveLiabilities { a, pi });
        }
        out.push(finish(&model, a, pi));
    }
    Ok(out)
}

/// Dispatches on the model's fiscal regime.
pub fn solve(model: &Model, opts: &ScanOptions) -> Result<Vec<SteadyState>> {
    match &model.regime {
        FiscalRegime::DebtTargeting(d) => solve_debt_targeting(&model.params, &model.rule, d, opts),
        FiscalRegime::Activist(a) => solve_activist(&model.params, &model.rule, a, opts),
    }
}

/// Trap and target steady states `(low, high)`.
pub fn trap_and_target(model: &Model, opts: &ScanOptions) -> Result<(SteadyState, SteadyState)> {
    let mut states = solve(model, opts)?;
    let high = states.pop().expect("two roots");
    let low = states.pop().expect("two roots");
    Ok((low, high))
}
