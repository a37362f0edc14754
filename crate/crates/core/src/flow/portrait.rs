use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::basin::{basin_grid, BasinGrid, BasinOptions};
use super::heteroclinic::{heteroclinic, HeteroclinicOptions};
use super::isoclines::{isoclines, IsoclineOptions, Isoclines, Polyline};
use super::manifold::{manifold, Branch, ManifoldOptions, StableArm, Which};
use super::trajectory::PhaseBox;
use crate::error::Result;
use crate::localdyn::{eigen2, jacobian, Classification, EigenReport};
use crate::model::Model;
use crate::policy::FiscalRegime;
use crate::steady::{trap_and_target, ScanOptions, SteadyState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedState {
    pub state: SteadyState,
    pub classification: Classification,
    pub eigen: EigenReport,
}

/// Everything needed to draw a phase diagram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePortrait {
    pub regime: String,
    pub steady_states: Vec<ClassifiedState>,
    pub isoclines: Isoclines,
    /// Named invariant-manifold branches.
    pub manifolds: BTreeMap<String, Polyline>,
    pub heteroclinic: Option<Polyline>,
    pub basin: Option<BasinGrid>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortraitOptions {
    pub pi_range: Option<(f64, f64)>,
    pub basin_box: Option<PhaseBox>,
    pub resolution: Option<(usize, usize)>,
    pub isoclines: IsoclineOptions,
    pub manifold: ManifoldOptions,
    pub basin: BasinOptions,
    pub heteroclinic: HeteroclinicOptions,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        PortraitOptions {
            pi_range: None,
            basin_box: None,
            resolution: Some((41, 41)),
            isoclines: IsoclineOptions::default(),
            manifold: ManifoldOptions::default(),
            basin: BasinOptions::default(),
            heteroclinic: HeteroclinicOptions::default(),
        }
    }
}

/// Default window around both steady states.
pub fn default_box(trap: &SteadyState, target: &SteadyState) -> PhaseBox {
    let (a_lo, a_hi) = (trap.a.min(target.a), trap.a.max(target.a));
    let (p_lo, p_hi) = (trap.pi.min(target.pi), trap.pi.max(target.pi));
    let da = (a_hi - a_lo).max(0.5 * a_hi.abs()).max(0.1);
    let dp = (p_hi - p_lo).max(0.01);
    PhaseBox {
        a_min: a_lo - 0.5 * da,
        a_max: a_hi + 0.5 * da,
        pi_min: p_lo - 0.5 * dp,
        pi_max: p_hi + 0.5 * dp,
    }
}

fn tag(which: Which, branch: Branch, at: &str) -> String {
    let w = match which {
        Which::Stable => "stable",
        Which::Unstable => "unstable",
    };
    let b = match branch {
        Branch::Plus => "plus",
        Branch::Minus => "minus",
    };
    format!("{w}_{at}_{b}")
}

pub fn phase_portrait(model: &Model, opts: &PortraitOptions) -> Result<PhasePortrait> {
    let (trap, target) = trap_and_target(model, &ScanOptions::default())?;
    let bx = opts.basin_box.unwrap_or_else(|| default_box(&trap, &target));
    let pi_range = opts.pi_range.unwrap_or((bx.pi_min, bx.pi_max));

    let mut steady_states = Vec::new();
    for ss in [&trap, &target] {
        let eigen = eigen2(&jacobian(model, ss)?);
        steady_states.push(ClassifiedState {
            state: ss.clone(),
            classification: eigen.classification,
            eigen,
        });
    }

    let iso = isoclines(model, pi_range, &opts.isoclines)?;

    let mut mopts = opts.manifold.clone();
    mopts.bounds = Some(bx.expanded(0.5));
    mopts.stop_at = vec![trap.state(), target.state()];
    let mut manifolds = BTreeMap::new();
    let arm = StableArm::compute(model, &target, &mopts)?;
    manifolds.insert("stable_arm_target".to_string(), arm.polyline());
    for (ss, at) in [(&target, "target"), (&trap, "trap")] {
        for which in [Which::Stable, Which::Unstable] {
            for branch in [Branch::Plus, Branch::Minus] {
                // Absent directions (spirals, wrong sign) are simply skipped.
                if let Ok(m) = manifold(model, ss, which, branch, &mopts) {
                    manifolds.insert(tag(which, branch, at), m.polyline);
                }
            }
        }
    }

    let heteroclinic_line = match model.regime {
        FiscalRegime::Activist(_) => heteroclinic(model, &trap, &target, &opts.heteroclinic).ok().map(|h| {
            let mut line = Polyline::default();
            for i in 0..h.trajectory.len() {
                line.push(h.trajectory.a[i], h.trajectory.pi[i]);
            }
            line
        }),
        FiscalRegime::DebtTargeting(_) => None,
    };

    let basin = match opts.resolution {
        Some(res) => Some(basin_grid(model, target.state(), trap.state(), &bx, res, &opts.basin)?),
        None => None,
    };

    Ok(PhasePortrait {
        regime: model.regime.tag().to_string(),
        steady_states,
        isoclines: iso,
        manifolds,
        heteroclinic: heteroclinic_line,
        basin,
    })
}
