use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trajectory::{integrate, Direction, IntegrateOptions, PhaseBox, StopRule, TerminalStatus};
use crate::error::{Error, Result};
use crate::model::{Model, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasinLabel {
    TargetConverging,
    TrapConverging,
    Escaped,
    Undecided,
}

impl BasinLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            BasinLabel::TargetConverging => "target_converging",
            BasinLabel::TrapConverging => "trap_converging",
            BasinLabel::Escaped => "escaped",
            BasinLabel::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasinOptions {
    pub horizon: f64,
    pub ball: f64,
    /// Trajectories leaving the grid box grown by this factor count as escaped.
    pub escape_margin: f64,
}

impl Default for BasinOptions {
    fn default() -> Self {
        BasinOptions {
            horizon: 2000.0,
            ball: 1e-6,
            escape_margin: 1.0,
        }
    }
}

/// Labels over a regular grid; `labels[i][j]` belongs to `(a[j], pi[i])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinGrid {
    pub a: Vec<f64>,
    pub pi: Vec<f64>,
    pub labels: Vec<Vec<BasinLabel>>,
}

impl BasinGrid {
    pub fn count(&self, label: BasinLabel) -> usize {
        self.labels.iter().flatten().filter(|&&l| l == label).count()
    }
}

/// Fate of a single initial condition.
pub fn classify_point(model: &Model, x0: StateVector, target: StateVector, trap: StateVector, escape: &PhaseBox, opts: &BasinOptions) -> BasinLabel {
    let io = IntegrateOptions {
        stop: StopRule::ball(vec![target, trap], opts.ball),
        bounds: Some(*escape),
        ..IntegrateOptions::default()
    };
    match integrate(model, x0, opts.horizon, Direction::Forward, &io) {
        Ok(tr) => match tr.status {
            TerminalStatus::Converged { to } if to == target => BasinLabel::TargetConverging,
            TerminalStatus::Converged { .. } => BasinLabel::TrapConverging,
            TerminalStatus::Escaped => BasinLabel::Escaped,
            TerminalStatus::Horizon => BasinLabel::Undecided,
        },
        Err(_) => BasinLabel::Undecided,
    }
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Integrates every grid point of `bx` in parallel and labels its fate.
pub fn basin_grid(model: &Model, target: StateVector, trap: StateVector, bx: &PhaseBox, resolution: (usize, usize), opts: &BasinOptions) -> Result<BasinGrid> {
    let (na, npi) = resolution;
    if na == 0 || npi == 0 {
        return Err(Error::Domain("basin resolution must be positive".into()));
    }
    if !(bx.a_min < bx.a_max && bx.pi_min < bx.pi_max) {
        return Err(Error::Domain("basin box is empty".into()));
    }
    if !bx.contains_state(target) || !bx.contains_state(trap) {
        return Err(Error::Domain("basin box must contain both steady states".into()));
    }
    let a = axis(bx.a_min, bx.a_max, na);
    let pi = axis(bx.pi_min, bx.pi_max, npi);
    let escape = bx.expanded(opts.escape_margin);
    let flat: Vec<BasinLabel> = (0..na * npi)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / na, k % na);
            classify_point(model, StateVector::new(a[j], pi[i]), target, trap, &escape, opts)
        })
        .collect();
    let labels = flat.chunks(na).map(|row| row.to_vec()).collect();
    Ok(BasinGrid { a, pi, labels })
}
