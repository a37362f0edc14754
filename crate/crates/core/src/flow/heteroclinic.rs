//! Orbit connecting the trap to the target saddle under the activist regime.

use serde::{Deserialize, Serialize};

use super::manifold::{manifold_eigenpair, reverse_with_tail, Which};
use super::trajectory::{integrate, integrate_dense, Direction, Integration, IntegrateOptions, PhaseBox, StopRule, TerminalStatus, Trajectory};
use crate::error::{Error, Result};
use crate::localdyn::{eigen2, jacobian, Classification};
use crate::model::{Model, StateVector};
use crate::policy::FiscalRegime;
use crate::steady::SteadyState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeteroclinicOptions {
    /// Offset of the seed from the target along its stable eigenvector.
    pub seed_eps: f64,
    /// Radius around the trap that counts as arrival.
    pub trap_ball: f64,
    /// Longest backward integration, in years.
    pub horizon: f64,
    /// Years of linearized approach appended after the seed.
    pub tail: f64,
    pub sample_interval: f64,
    pub bounds: Option<PhaseBox>,
}

impl Default for HeteroclinicOptions {
    fn default() -> Self {
        HeteroclinicOptions {
            seed_eps: 1e-6,
            trap_ball: 1e-4,
            horizon: 5000.0,
            tail: 400.0,
            sample_interval: 0.05,
            bounds: Some(PhaseBox {
                a_min: -10.0,
                a_max: 10.0,
                pi_min: -0.5,
                pi_max: 0.5,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectionMethod {
    BackwardStableArm,
    ForwardShooting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heteroclinic {
    /// Forward-time orbit from the trap neighbourhood to the target.
    pub trajectory: Trajectory,
    pub trap: StateVector,
    pub target: StateVector,
    /// Distance of the orbit's first point from the trap.
    pub trap_residual: f64,
    /// Distance from the target at which the computed orbit hands over to
    /// the linearized approach.
    pub target_residual: f64,
    pub method: ConnectionMethod,
    /// Years spent between the two neighbourhoods.
    pub transit_time: f64,
}

fn check_endpoints(model: &Model, trap: &SteadyState, target: &SteadyState) -> Result<()> {
    if !matches!(model.regime, FiscalRegime::Activist(_)) {
        return Err(Error::Domain("heteroclinic orbit requires the activist regime".into()));
    }
    let et = eigen2(&jacobian(model, target)?);
    if et.classification != Classification::Saddle {
        return Err(Error::NotASaddle(et.classification.to_string()));
    }
    let el = eigen2(&jacobian(model, trap)?);
    if !matches!(el.classification, Classification::UnstableNode | Classification::UnstableSpiral) {
        return Err(Error::WrongClassification(format!(
            "trap must be an unstable node or spiral, got {}",
            el.classification
        )));
    }
    Ok(())
}

/// Backward integration from `target + sign·ε·v_s`, stopping on entry to
/// the trap ball.
pub fn trace_stable_branch(model: &Model, trap: &SteadyState, target: &SteadyState, sign: f64, opts: &HeteroclinicOptions) -> Result<Integration> {
    let eig = eigen2(&jacobian(model, target)?);
    let (_, v) = manifold_eigenpair(&eig, Which::Stable)?;
    let s = sign * opts.seed_eps;
    let seed = StateVector::new(target.a + s * v[0], target.pi + s * v[1]);
    let io = IntegrateOptions {
        stop: StopRule::ball(vec![trap.state()], opts.trap_ball),
        bounds: opts.bounds,
        ..IntegrateOptions::default()
    };
    integrate_dense(model, seed, opts.horizon, Direction::Backward, &io)
}

/// Sign of the stable-eigenvector seed that points toward the trap.
pub fn sign_toward_trap(model: &Model, trap: &SteadyState, target: &SteadyState) -> Result<f64> {
    let eig = eigen2(&jacobian(model, target)?);
    let (_, v) = manifold_eigenpair(&eig, Which::Stable)?;
    let d = [trap.a - target.a, trap.pi - target.pi];
    Ok(if v[0] * d[0] + v[1] * d[1] >= 0.0 { 1.0 } else { -1.0 })
}

/// Connects the trap to the target, by backward integration of the target's
/// stable arm with forward shooting from the trap as fallback.
pub fn heteroclinic(model: &Model, trap: &SteadyState, target: &SteadyState, opts: &HeteroclinicOptions) -> Result<Heteroclinic> {
    check_endpoints(model, trap, target)?;
    let eig = eigen2(&jacobian(model, target)?);
    let (lambda, v) = manifold_eigenpair(&eig, Which::Stable)?;
    let preferred = sign_toward_trap(model, trap, target)?;

    let mut closest = f64::INFINITY;
    for sign in [preferred, -preferred] {
        let run = trace_stable_branch(model, trap, target, sign, opts)?;
        if let TerminalStatus::Converged { .. } = run.status {
            let &(t_hit, x_hit) = run.samples.last().expect("non-empty");
            let offset = [sign * opts.seed_eps * v[0], sign * opts.seed_eps * v[1]];
            let span = -t_hit;
            let trajectory = reverse_with_tail(
                model,
                &run.dense,
                t_hit,
                target.state(),
                offset,
                lambda,
                span + opts.tail,
                opts.sample_interval,
            );
            return Ok(Heteroclinic {
                trap_residual: StateVector::from_array(x_hit).dist(&trap.state()),
                target_residual: opts.seed_eps,
                trajectory,
                trap: trap.state(),
                target: target.state(),
                method: ConnectionMethod::BackwardStableArm,
                transit_time: span,
            });
        }
        for (_, x) in &run.samples {
            closest = closest.min(StateVector::from_array(*x).dist(&trap.state()));
        }
    }

    shoot_heteroclinic(model, trap, target, opts).map_err(|e| match e {
        Error::NoConnection(msg) => Error::NoConnection(format!(
            "{msg}; backward arm closest approach to trap = {closest:e}"
        )),
        other => other,
    })
}

struct Shot {
    side: f64,
    closest: f64,
    index: usize,
    trajectory: Trajectory,
}

fn shoot(model: &Model, trap: &SteadyState, target: &SteadyState, v_s: [f64; 2], angle: f64, opts: &HeteroclinicOptions) -> Result<Shot> {
    let x0 = StateVector::new(
        trap.a + opts.trap_ball * 0.5 * angle.cos(),
        trap.pi + opts.trap_ball * 0.5 * angle.sin(),
    );
    let io = IntegrateOptions {
        stop: StopRule::ball(vec![target.state()], opts.seed_eps),
        bounds: opts.bounds,
        ..IntegrateOptions::default()
    };
    let tr = integrate(model, x0, opts.horizon, Direction::Forward, &io)?;
    let (mut index, mut closest) = (0, f64::INFINITY);
    for i in 0..tr.len() {
        let d = tr.state(i).dist(&target.state());
        if d < closest {
            closest = d;
            index = i;
        }
    }
    let d = [tr.a[index] - target.a, tr.pi[index] - target.pi];
    Ok(Shot {
        side: (v_s[0] * d[1] - v_s[1] * d[0]).signum(),
        closest,
        index,
        trajectory: tr,
    })
}

/// Forward shooting from a small circle around a trap node, bisecting on
/// the seed angle so the orbit threads the target's stable arm.
pub fn shoot_heteroclinic(model: &Model, trap: &SteadyState, target: &SteadyState, opts: &HeteroclinicOptions) -> Result<Heteroclinic> {
    check_endpoints(model, trap, target)?;
    let trap_eig = eigen2(&jacobian(model, trap)?);
    let (_, eta) = manifold_eigenpair(&trap_eig, Which::Unstable)?;
    let (lambda, v_s) = manifold_eigenpair(&eigen2(&jacobian(model, target)?), Which::Stable)?;

    let base = eta[1].atan2(eta[0]);
    let n = 48;
    let mut best: Option<Shot> = None;
    for half in [0.0, std::f64::consts::PI] {
        let angles: Vec<f64> = (0..=n)
            .map(|k| base + half - 0.5 * std::f64::consts::PI + std::f64::consts::PI * k as f64 / n as f64)
            .collect();
        let mut prev: Option<(f64, Shot)> = None;
        for &ang in &angles {
            let shot = shoot(model, trap, target, v_s, ang, opts)?;
            if let Some((pa, ps)) = prev.take() {
                if ps.side != shot.side {
                    let (mut lo, mut hi, side_lo) = (pa, ang, ps.side);
                    let mut mid_shot = shot;
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        mid_shot = shoot(model, trap, target, v_s, mid, opts)?;
                        if mid_shot.closest < opts.seed_eps * 1.01 {
                            break;
                        }
                        if mid_shot.side == side_lo {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    if best.as_ref().is_none_or(|b| mid_shot.closest < b.closest) {
                        best = Some(mid_shot);
                    }
                    prev = None;
                    continue;
                }
            }
            prev = Some((ang, shot));
        }
    }

    let shot = best.ok_or_else(|| {
        Error::NoConnection("no sign change of the crossing side over seed angles".into())
    })?;
    if shot.closest >= opts.trap_ball {
        return Err(Error::NoConnection(format!(
            "closest approach to target = {:e}",
            shot.closest
        )));
    }

    // Hand over to the linear approach along the stable direction.
    let tr = &shot.trajectory;
    let d = [tr.a[shot.index] - target.a, tr.pi[shot.index] - target.pi];
    let proj = d[0] * v_s[0] + d[1] * v_s[1];
    let offset = [proj * v_s[0], proj * v_s[1]];
    let t_c = tr.t[shot.index];
    let mut samples: Vec<_> = tr.samples().into_iter().take(shot.index + 1).collect();
    let mut tau = opts.sample_interval;
    while tau <= opts.tail {
        let decay = (lambda * tau).exp();
        samples.push((t_c + tau, [target.a + offset[0] * decay, target.pi + offset[1] * decay]));
        tau += opts.sample_interval;
    }
    let trajectory = Trajectory::from_samples(model, &samples, TerminalStatus::Converged { to: target.state() });
    Ok(Heteroclinic {
        trap_residual: trajectory.state(0).dist(&trap.state()),
        target_residual: shot.closest,
        trajectory,
        trap: trap.state(),
        target: target.state(),
        method: ConnectionMethod::ForwardShooting,
        transit_time: t_c,
    })
}
