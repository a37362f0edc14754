use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::ode::{dopri5, DenseSolution, DenseStep, Finish, OdeOptions, Vec2};
use crate::error::{Error, Result};
use crate::model::{Model, StateVector};
use crate::prefs::omega;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TerminalStatus {
    Converged { to: StateVector },
    Escaped,
    Horizon,
}

/// Rectangle in the phase plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseBox {
    pub a_min: f64,
    pub a_max: f64,
    pub pi_min: f64,
    pub pi_max: f64,
}

impl PhaseBox {
    pub fn contains(&self, x: Vec2) -> bool {
        x[0] >= self.a_min && x[0] <= self.a_max && x[1] >= self.pi_min && x[1] <= self.pi_max
    }

    pub fn contains_state(&self, x: StateVector) -> bool {
        self.contains(x.to_array())
    }

    /// Box grown by `factor` times its span on every side.
    pub fn expanded(&self, factor: f64) -> PhaseBox {
        let da = (self.a_max - self.a_min) * factor;
        let dp = (self.pi_max - self.pi_min) * factor;
        PhaseBox {
            a_min: self.a_min - da,
            a_max: self.a_max + da,
            pi_min: self.pi_min - dp,
            pi_max: self.pi_max + dp,
        }
    }
}

/// When an integration counts as having reached a steady state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub targets: Vec<StateVector>,
    pub ball: f64,
    /// Extra requirement `||f|| < f_tol`; `None` stops on ball entry alone.
    pub f_tol: Option<f64>,
}

impl StopRule {
    pub fn none() -> Self {
        StopRule {
            targets: Vec::new(),
            ball: 1e-8,
            f_tol: Some(1e-12),
        }
    }

    pub fn strict(targets: Vec<StateVector>) -> Self {
        StopRule {
            targets,
            ball: 1e-8,
            f_tol: Some(1e-12),
        }
    }

    pub fn ball(targets: Vec<StateVector>, radius: f64) -> Self {
        StopRule {
            targets,
            ball: radius,
            f_tol: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Output spacing in years; `None` emits every accepted step.
    pub sample_interval: Option<f64>,
    pub stop: StopRule,
    pub bounds: Option<PhaseBox>,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            rtol: 1e-9,
            atol: 1e-12,
            sample_interval: None,
            stop: StopRule::none(),
            bounds: None,
            h_min: 1e-12,
            max_steps: 5_000_000,
        }
    }
}

impl IntegrateOptions {
    fn ode(&self) -> OdeOptions {
        OdeOptions {
            rtol: self.rtol,
            atol: self.atol,
            h_min: self.h_min,
            max_steps: self.max_steps,
            ..OdeOptions::default()
        }
    }
}

/// Sampled solution with the derived monetary and fiscal series.
///
/// Samples are stored in increasing `t`; a backward run starting at
/// `t = 0` ends up with non-positive times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub a: Vec<f64>,
    pub pi: Vec<f64>,
    #[serde(rename = "R")]
    pub nominal_rate: Vec<f64>,
    pub m: Vec<f64>,
    pub b: Vec<f64>,
    pub s: Vec<f64>,
    pub status: TerminalStatus,
}

impl Trajectory {
    /// Builds the derived series from `(t, a, π)` samples.
    pub fn from_samples(model: &Model, samples: &[(f64, Vec2)], status: TerminalStatus) -> Self {
        let n = samples.len();
        let mut tr = Trajectory {
            t: Vec::with_capacity(n),
            a: Vec::with_capacity(n),
            pi: Vec::with_capacity(n),
            nominal_rate: Vec::with_capacity(n),
            m: Vec::with_capacity(n),
            b: Vec::with_capacity(n),
            s: Vec::with_capacity(n),
            status,
        };
        for &(t, [a, pi]) in samples {
            let r = model.rule.psi(pi);
            let m = omega(r, &model.params).map(|o| 1.0 / o).unwrap_or(f64::NAN);
            tr.t.push(t);
            tr.a.push(a);
            tr.pi.push(pi);
            tr.nominal_rate.push(r);
            tr.m.push(m);
            tr.b.push(a - m);
            tr.s.push(model.surplus(StateVector::new(a, pi)));
        }
        tr
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn state(&self, i: usize) -> StateVector {
        StateVector::new(self.a[i], self.pi[i])
    }

    pub fn first(&self) -> Option<StateVector> {
        (!self.is_empty()).then(|| self.state(0))
    }

    pub fn last(&self) -> Option<StateVector> {
        (!self.is_empty()).then(|| self.state(self.len() - 1))
    }

    pub fn samples(&self) -> Vec<(f64, Vec2)> {
        (0..self.len()).map(|i| (self.t[i], [self.a[i], self.pi[i]])).collect()
    }

    /// Same path traversed the other way, re-timed to start at zero.
    pub fn reversed(&self, model: &Model) -> Trajectory {
        let Some(&t_end) = self.t.last() else {
            return self.clone();
        };
        let mut samples: Vec<(f64, Vec2)> = self
            .samples()
            .into_iter()
            .rev()
            .map(|(t, x)| (t_end - t, x))
            .collect();
        samples.dedup_by(|a, b| a.0 == b.0);
        Trajectory::from_samples(model, &samples, self.status)
    }

    /// Total signed angle swept around `center`.
    pub fn winding_angle(&self, center: StateVector) -> f64 {
        let mut total = 0.0;
        let mut prev: Option<f64> = None;
        for i in 0..self.len() {
            let ang = (self.pi[i] - center.pi).atan2(self.a[i] - center.a);
            if let Some(p) = prev {
                let mut d = ang - p;
                while d > std::f64::consts::PI {
                    d -= 2.0 * std::f64::consts::PI;
                }
                while d < -std::f64::consts::PI {
                    d += 2.0 * std::f64::consts::PI;
                }
                total += d;
            }
            prev = Some(ang);
        }
        total
    }
}

/// Raw result of one integration: the dense solution plus outcome.
#[derive(Debug, Clone)]
pub struct Integration {
    pub dense: DenseSolution,
    pub samples: Vec<(f64, Vec2)>,
    pub status: TerminalStatus,
}

fn field(model: &Model) -> impl Fn(Vec2) -> Vec2 + '_ {
    move |y| {
        let (da, dp) = model.vector_field(StateVector::from_array(y));
        [da, dp]
    }
}

fn converged(model: &Model, stop: &StopRule, x: Vec2) -> Option<StateVector> {
    let sv = StateVector::from_array(x);
    let hit = stop.targets.iter().find(|ss| ss.dist(&sv) < stop.ball)?;
    if let Some(tol) = stop.f_tol {
        let (da, dp) = model.vector_field(sv);
        if da.hypot(dp) >= tol {
            return None;
        }
    }
    Some(*hit)
}

/// Runs the integrator and keeps everything needed for later lookups.
pub fn integrate_dense(model: &Model, x0: StateVector, horizon: f64, direction: Direction, opts: &IntegrateOptions) -> Result<Integration> {
    if !(horizon > 0.0) {
        return Err(Error::Domain(format!("horizon must be > 0 (got {horizon})")));
    }
    let dir = direction.sign();
    let t_end = dir * horizon;
    let mut dense = DenseSolution::default();
    let mut samples = vec![(0.0, x0.to_array())];
    let mut status = TerminalStatus::Horizon;
    let mut next_sample = opts.sample_interval.map(|dt| dir * dt);
    let f = field(model);

    if let Some(to) = converged(model, &opts.stop, x0.to_array()) {
        return Ok(Integration {
            dense,
            samples,
            status: TerminalStatus::Converged { to },
        });
    }

    let mut on_step = |step: &DenseStep| -> ControlFlow<()> {
        dense.steps.push(*step);
        // Event scan on a few interior points of the step.
        let mut stop_at: Option<(f64, Vec2, TerminalStatus)> = None;
        for q in [0.25, 0.5, 0.75, 1.0] {
            let t = step.t0 + q * step.h;
            let y = if q == 1.0 { step.y1() } else { step.eval(t) };
            if let Some(to) = converged(model, &opts.stop, y) {
                stop_at = Some((t, y, TerminalStatus::Converged { to }));
                break;
            }
            let outside = opts.bounds.as_ref().is_some_and(|b| !b.contains(y));
            if outside || !y[0].is_finite() || !y[1].is_finite() {
                stop_at = Some((t, y, TerminalStatus::Escaped));
                break;
            }
        }
        let t_stop = stop_at.as_ref().map_or(step.t1(), |s| s.0);

        if let (Some(dt), Some(ts)) = (opts.sample_interval, next_sample.as_mut()) {
            while dir * (*ts - t_stop) < -1e-12 * dt {
                samples.push((*ts, step.eval(*ts)));
                *ts += dir * dt;
            }
        }
        match stop_at {
            Some((t, y, st)) => {
                samples.push((t, y));
                status = st;
                ControlFlow::Break(())
            }
            None => {
                if opts.sample_interval.is_none() {
                    samples.push((step.t1(), step.y1()));
                }
                ControlFlow::Continue(())
            }
        }
    };

    let finish = dopri5(&f, 0.0, x0.to_array(), t_end, &opts.ode(), &mut on_step);
    match finish {
        Ok(Finish::End) => {
            if let Some(step) = dense.steps.last() {
                let last_t = samples.last().map(|s| s.0).unwrap_or(0.0);
                if (last_t - t_end).abs() > 1e-12 * horizon.max(1.0) {
                    samples.push((t_end, step.y1()));
                }
            }
        }
        Ok(Finish::Stopped) => {}
        Ok(Finish::MaxSteps(_)) => {}
        Err(u) => {
            let partial = finish_samples(model, samples, direction, TerminalStatus::Horizon);
            return Err(Error::Stiffness {
                t: u.t,
                h: u.h,
                partial: Box::new(partial),
            });
        }
    }
    dedup_times(&mut samples);
    Ok(Integration {
        dense,
        samples,
        status,
    })
}

fn dedup_times(samples: &mut Vec<(f64, Vec2)>) {
    samples.dedup_by(|b, a| a.0 == b.0);
}

fn finish_samples(model: &Model, mut samples: Vec<(f64, Vec2)>, direction: Direction, status: TerminalStatus) -> Trajectory {
    dedup_times(&mut samples);
    if direction == Direction::Backward {
        samples.reverse();
    }
    Trajectory::from_samples(model, &samples, status)
}

/// Integrates the model from `x0` for `horizon` years in the given direction.
pub fn integrate(model: &Model, x0: StateVector, horizon: f64, direction: Direction, opts: &IntegrateOptions) -> Result<Trajectory> {
    let run = integrate_dense(model, x0, horizon, direction, opts)?;
    Ok(finish_samples(model, run.samples, direction, run.status))
}
