//! Phase-plane flow: integration, isoclines, invariant manifolds,
//! connecting orbits, basins and solvency diagnostics.

pub mod basin;
pub mod heteroclinic;
pub mod isoclines;
pub mod manifold;
pub mod ode;
pub mod portrait;
pub mod solvency;
pub mod trajectory;

pub use basin::{basin_grid, classify_point, BasinGrid, BasinLabel, BasinOptions};
pub use heteroclinic::{heteroclinic, shoot_heteroclinic, trace_stable_branch, ConnectionMethod, Heteroclinic, HeteroclinicOptions};
pub use isoclines::{isoclines, pi_dot_locus, IsoclineOptions, Isoclines, PiDotLocus, Polyline};
pub use manifold::{manifold, Branch, Manifold, ManifoldOptions, StableArm, Which};
pub use portrait::{phase_portrait, ClassifiedState, PhasePortrait, PortraitOptions};
pub use solvency::{solvency_report, SolvencyReport};
pub use trajectory::{integrate, integrate_dense, Direction, IntegrateOptions, PhaseBox, StopRule, TerminalStatus, Trajectory};

use crate::model::{Model, StateVector};

/// `(ȧ, π̇)` at `x`.
pub fn vector_field(model: &Model, x: StateVector) -> (f64, f64) {
    model.vector_field(x)
}
