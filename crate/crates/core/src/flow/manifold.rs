//! One-dimensional invariant manifolds seeded along eigendirections, and
//! the stable arm of a saddle as a lookup object.

use serde::{Deserialize, Serialize};

use super::isoclines::Polyline;
use super::ode::{DenseSolution, Vec2};
use super::trajectory::{integrate_dense, Direction, IntegrateOptions, PhaseBox, StopRule, TerminalStatus, Trajectory};
use crate::error::{Error, Result};
use crate::localdyn::{eigen2, jacobian, Classification, EigenReport};
use crate::model::{Model, StateVector};
use crate::steady::SteadyState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Stable,
    Unstable,
}

/// Side of the steady state, relative to the unit eigenvector whose
/// `a`-component is non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldOptions {
    pub seed_eps: f64,
    pub horizon: f64,
    pub bounds: Option<PhaseBox>,
    /// Steady states at which the branch is considered finished.
    pub stop_at: Vec<StateVector>,
    pub stop_ball: f64,
    pub sample_interval: Option<f64>,
}

impl Default for ManifoldOptions {
    fn default() -> Self {
        ManifoldOptions {
            seed_eps: 1e-6,
            horizon: 2000.0,
            bounds: Some(PhaseBox {
                a_min: -10.0,
                a_max: 10.0,
                pi_min: -0.5,
                pi_max: 0.5,
            }),
            stop_at: Vec::new(),
            stop_ball: 1e-6,
            sample_interval: None,
        }
    }
}

impl ManifoldOptions {
    fn integrate_options(&self) -> IntegrateOptions {
        IntegrateOptions {
            sample_interval: self.sample_interval,
            stop: StopRule::ball(self.stop_at.clone(), self.stop_ball),
            bounds: self.bounds,
            ..IntegrateOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifold {
    pub which: Which,
    pub branch: Branch,
    pub eigenvalue: f64,
    pub eigenvector: [f64; 2],
    pub seed: StateVector,
    /// Ordered outward from the steady state, which is the first point.
    pub polyline: Polyline,
    pub status: TerminalStatus,
}

/// Eigenpair spanning the requested manifold.
///
/// At a node both roots share a sign and the slower one is used, since
/// generic orbits are tangent to it.
pub fn manifold_eigenpair(eig: &EigenReport, which: Which) -> Result<(f64, [f64; 2])> {
    if eig.classification.is_spiral() || eig.classification == Classification::Degenerate {
        return Err(Error::WrongClassification(format!(
            "{} has no real {} eigendirection",
            eig.classification,
            match which {
                Which::Stable => "stable",
                Which::Unstable => "unstable",
            }
        )));
    }
    let (lo, hi) = eig.real_pair().expect("non-spiral has real roots");
    let v = eig.eigenvectors.expect("distinct real roots");
    let pick = match which {
        Which::Stable if hi < 0.0 => Some((hi, v[1])),
        Which::Stable if lo < 0.0 => Some((lo, v[0])),
        Which::Unstable if lo > 0.0 => Some((lo, v[0])),
        Which::Unstable if hi > 0.0 => Some((hi, v[1])),
        _ => None,
    };
    pick.ok_or_else(|| {
        Error::WrongClassification(format!(
            "{} has no {} eigenvalue",
            eig.classification,
            match which {
                Which::Stable => "negative",
                Which::Unstable => "positive",
            }
        ))
    })
}

/// Traces one branch of a stable or unstable manifold of `ss`.
pub fn manifold(model: &Model, ss: &SteadyState, which: Which, branch: Branch, opts: &ManifoldOptions) -> Result<Manifold> {
    let eig = eigen2(&jacobian(model, ss)?);
    let (lambda, v) = manifold_eigenpair(&eig, which)?;
    let s = branch.sign() * opts.seed_eps;
    let seed = StateVector::new(ss.a + s * v[0], ss.pi + s * v[1]);
    let dir = match which {
        Which::Stable => Direction::Backward,
        Which::Unstable => Direction::Forward,
    };
    let run = integrate_dense(model, seed, opts.horizon, dir, &opts.integrate_options())?;
    let mut polyline = Polyline::default();
    polyline.push(ss.a, ss.pi);
    for (_, x) in &run.samples {
        polyline.push(x[0], x[1]);
    }
    Ok(Manifold {
        which,
        branch,
        eigenvalue: lambda,
        eigenvector: v,
        seed,
        polyline,
        status: run.status,
    })
}

#[derive(Debug, Clone)]
struct ArmBranch {
    sign: f64,
    dense: DenseSolution,
}

/// Both branches of a saddle's stable manifold, integrated backward and
/// kept as continuous solutions.
#[derive(Debug, Clone)]
pub struct StableArm {
    pub ss: StateVector,
    pub eigenvalue: f64,
    pub eigenvector: [f64; 2],
    pub seed_eps: f64,
    branches: Vec<ArmBranch>,
}

/// Position of a point on the arm: which branch and at what backward time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmPoint {
    pub branch: Branch,
    pub t: f64,
    pub state: StateVector,
}

impl StableArm {
    pub fn compute(model: &Model, ss: &SteadyState, opts: &ManifoldOptions) -> Result<Self> {
        let eig = eigen2(&jacobian(model, ss)?);
        if eig.classification != Classification::Saddle {
            return Err(Error::NotASaddle(eig.classification.to_string()));
        }
        let (lambda, v) = manifold_eigenpair(&eig, Which::Stable)?;
        let mut branches = Vec::with_capacity(2);
        for sign in [1.0, -1.0] {
            let s = sign * opts.seed_eps;
            let seed = StateVector::new(ss.a + s * v[0], ss.pi + s * v[1]);
            let run = integrate_dense(model, seed, opts.horizon, Direction::Backward, &opts.integrate_options())?;
            branches.push(ArmBranch {
                sign,
                dense: run.dense,
            });
        }
        Ok(StableArm {
            ss: ss.state(),
            eigenvalue: lambda,
            eigenvector: v,
            seed_eps: opts.seed_eps,
            branches,
        })
    }

    fn branch_of(sign: f64) -> Branch {
        if sign > 0.0 {
            Branch::Plus
        } else {
            Branch::Minus
        }
    }

    /// First point, moving outward from the steady state, where the arm
    /// has liabilities `a`.
    pub fn locate(&self, a: f64) -> Option<ArmPoint> {
        let mut best: Option<ArmPoint> = None;
        for br in &self.branches {
            let seed_a = self.ss.a + br.sign * self.seed_eps * self.eigenvector[0];
            let mut prev_a = seed_a;
            for step in &br.dense.steps {
                let y1 = step.y1();
                let (lo, hi) = if prev_a <= y1[0] { (prev_a, y1[0]) } else { (y1[0], prev_a) };
                if a >= lo && a <= hi {
                    let g = |t: f64| step.eval(t)[0] - a;
                    let (mut t0, mut t1) = (step.t0, step.t1());
                    let g0 = g(t0);
                    for _ in 0..200 {
                        let mid = 0.5 * (t0 + t1);
                        if mid == t0 || mid == t1 {
                            break;
                        }
                        if (g(mid) < 0.0) == (g0 < 0.0) {
                            t0 = mid;
                        } else {
                            t1 = mid;
                        }
                    }
                    let t = 0.5 * (t0 + t1);
                    let y = step.eval(t);
                    let cand = ArmPoint {
                        branch: Self::branch_of(br.sign),
                        t,
                        state: StateVector::new(y[0], y[1]),
                    };
                    if best.is_none_or(|b| t.abs() < b.t.abs()) {
                        best = Some(cand);
                    }
                    break;
                }
                prev_a = y1[0];
            }
        }
        best
    }

    /// Inflation on the arm at liabilities `a`.
    pub fn pi_at(&self, a: f64) -> Option<f64> {
        self.locate(a).map(|p| p.state.pi)
    }

    /// Polyline of both branches through the steady state, ordered from the
    /// far end of the minus branch to the far end of the plus branch.
    pub fn polyline(&self) -> Polyline {
        let mut line = Polyline::default();
        let branch_points = |br: &ArmBranch| -> Vec<Vec2> {
            let s = br.sign * self.seed_eps;
            let mut pts = vec![[self.ss.a + s * self.eigenvector[0], self.ss.pi + s * self.eigenvector[1]]];
            pts.extend(br.dense.steps.iter().map(|st| st.y1()));
            pts
        };
        let minus = self.branches.iter().find(|b| b.sign < 0.0).map(branch_points).unwrap_or_default();
        let plus = self.branches.iter().find(|b| b.sign > 0.0).map(branch_points).unwrap_or_default();
        for p in minus.iter().rev() {
            line.push(p[0], p[1]);
        }
        line.push(self.ss.a, self.ss.pi);
        for p in &plus {
            line.push(p[0], p[1]);
        }
        line
    }

    /// Equilibrium path starting on the arm at liabilities `a0`, in forward
    /// time, continued along the linearized stable direction up to `horizon`.
    pub fn saddle_path(&self, model: &Model, a0: f64, horizon: f64, dt: f64) -> Result<Trajectory> {
        let point = self
            .locate(a0)
            .ok_or_else(|| Error::Domain(format!("a0 = {a0} is not reached by the stable arm")))?;
        let br = self
            .branches
            .iter()
            .find(|b| Self::branch_of(b.sign) == point.branch)
            .expect("branch exists");
        let offset = [br.sign * self.seed_eps * self.eigenvector[0], br.sign * self.seed_eps * self.eigenvector[1]];
        Ok(reverse_with_tail(
            model,
            &br.dense,
            point.t,
            self.ss,
            offset,
            self.eigenvalue,
            horizon,
            dt,
        ))
    }
}

/// Forward-time trajectory from backward solution time `t_from` to the seed
/// at `t = 0`, then `ss + offset·e^{λτ}` until `horizon`.
pub(crate) fn reverse_with_tail(
    model: &Model,
    dense: &DenseSolution,
    t_from: f64,
    ss: StateVector,
    offset: [f64; 2],
    lambda: f64,
    horizon: f64,
    dt: f64,
) -> Trajectory {
    let span = -t_from;
    let mut samples: Vec<(f64, Vec2)> = Vec::new();
    let mut k = 0usize;
    loop {
        let tau = k as f64 * dt;
        if tau >= span {
            break;
        }
        let y = if k == 0 {
            dense.eval(t_from).expect("inside solution")
        } else {
            dense.eval(t_from + tau).expect("inside solution")
        };
        samples.push((tau, y));
        k += 1;
    }
    let seed = [ss.a + offset[0], ss.pi + offset[1]];
    samples.push((span, seed));
    let mut j = 1usize;
    loop {
        let tau = span + j as f64 * dt;
        if tau > horizon {
            break;
        }
        let decay = (lambda * j as f64 * dt).exp();
        samples.push((tau, [ss.a + offset[0] * decay, ss.pi + offset[1] * decay]));
        j += 1;
    }
    samples.dedup_by(|b, a| b.0 <= a.0);
    Trajectory::from_samples(model, &samples, TerminalStatus::Converged { to: ss })
}
