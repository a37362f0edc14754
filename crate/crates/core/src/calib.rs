//! Calibration point check for the trap's inflation-feedback coefficient
//! and its robustness sweeps.
//!
//! The check only needs the rule's level and slope at the trap, so it is
//! evaluated from local anchors without committing to a global rule.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prefs::{calibrate_delta, lambda_big, lambda_prime, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPreset {
    pub rho: f64,
    pub mu: f64,
    pub n: f64,
    pub eps: f64,
    pub velocity: f64,
    /// `R* = Ψ(π*)`.
    pub r_star: f64,
    /// `Ψ(π^L)`.
    pub psi_trap: f64,
    /// `Ψ'(π^L)`.
    pub psi_prime_trap: f64,
    pub a_star: f64,
}

impl Default for CalibrationPreset {
    fn default() -> Self {
        CalibrationPreset {
            rho: 0.04,
            mu: 0.012366,
            n: 0.0047,
            eps: 0.6,
            velocity: 1.0,
            r_star: 0.06,
            psi_trap: 0.001,
            psi_prime_trap: 0.1,
            a_star: 0.6,
        }
    }
}

impl CalibrationPreset {
    pub fn beta(&self) -> f64 {
        self.n + self.mu
    }

    /// Parameters at elasticity `eps`, with `δ` from the velocity target.
    pub fn params(&self, eps: f64) -> Result<ModelParams> {
        let delta = calibrate_delta(self.velocity, self.r_star, eps)?;
        ModelParams::new(self.rho, self.mu, self.n, eps, delta)
    }
}

/// `∂π̇/∂π` at a steady state with liabilities `a`, from the rule's level
/// and slope there.
pub fn j22_from_anchors(params: &ModelParams, psi: f64, psi_prime: f64, a: f64) -> Result<f64> {
    let lam = lambda_big(psi, params)?;
    let lp = lambda_prime(psi, params)?;
    Ok((psi_prime - 1.0) * lam / (psi_prime * lp) + params.wealth_coeff() * a / lam)
}

/// Trap coefficient from the calibration anchors.
///
/// Works with `(δ/(1-δ))^-ε = R*^ε / velocity` directly: at high velocity
/// and low `ε` the share weight itself rounds to one.
pub fn j22_local(preset: &CalibrationPreset, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1) (got {eps})")));
    }
    if !(preset.velocity > 0.0 && preset.r_star > 0.0 && preset.psi_trap > 0.0 && preset.psi_prime_trap > 0.0) {
        return Err(Error::Domain("calibration anchors must be positive".into()));
    }
    let k = preset.r_star.powf(eps) / preset.velocity;
    let psi = preset.psi_trap;
    let slope = preset.psi_prime_trap;
    let lam = 1.0 + k * psi.powf(1.0 - eps);
    let lp = (1.0 - eps) * k * psi.powf(-eps);
    let w = preset.beta() * (preset.rho + preset.mu);
    Ok((slope - 1.0) * lam / (slope * lp) + w * preset.a_star / lam)
}

/// Interval for one sweep axis; open ends are pulled in by `INSET`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

pub const INSET: f64 = 1e-6;

impl Axis {
    pub const fn open(lo: f64, hi: f64) -> Self {
        Axis {
            lo,
            hi,
            lo_open: true,
            hi_open: true,
        }
    }

    pub fn points(&self, n: usize) -> Vec<f64> {
        let lo = if self.lo_open { self.lo + INSET } else { self.lo };
        let hi = if self.hi_open { self.hi - INSET } else { self.hi };
        if n <= 1 {
            return vec![0.5 * (lo + hi)];
        }
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRanges {
    pub eps: Axis,
    pub velocity: Axis,
    pub psi_trap: Axis,
    pub psi_prime_trap: Axis,
    pub a_star: Axis,
}

impl Default for SweepRanges {
    fn default() -> Self {
        SweepRanges {
            eps: Axis {
                lo: 0.05,
                hi: 0.5,
                lo_open: true,
                hi_open: false,
            },
            velocity: Axis::open(1.0, 20.0),
            psi_trap: Axis::open(0.001, 0.1),
            psi_prime_trap: Axis::open(0.01, 0.1),
            a_star: Axis::open(0.6, 2.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub eps: f64,
    pub velocity: f64,
    pub psi_trap: f64,
    pub psi_prime_trap: f64,
    pub a_star: f64,
    pub j22: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub points_per_axis: usize,
    pub points: Vec<SweepPoint>,
    pub min: SweepPoint,
    pub max: SweepPoint,
    /// Points with `J22 >= 0` (or not finite).
    pub violations: Vec<SweepPoint>,
}

impl SweepReport {
    pub fn all_negative(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates `j22_local` over the full Cartesian grid of `ranges`.
pub fn sweep_j22(preset: &CalibrationPreset, ranges: &SweepRanges, points_per_axis: usize) -> Result<SweepReport> {
    let axes = [
        ranges.eps.points(points_per_axis),
        ranges.velocity.points(points_per_axis),
        ranges.psi_trap.points(points_per_axis),
        ranges.psi_prime_trap.points(points_per_axis),
        ranges.a_star.points(points_per_axis),
    ];
    let k = points_per_axis.max(1);
    let total = k.pow(5);
    let points: Vec<SweepPoint> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut coord = [0.0; 5];
            for d in (0..5).rev() {
                coord[d] = axes[d][idx % k];
                idx /= k;
            }
            let local = CalibrationPreset {
                velocity: coord[1],
                psi_trap: coord[2],
                psi_prime_trap: coord[3],
                a_star: coord[4],
                ..*preset
            };
            let j22 = j22_local(&local, coord[0])?;
            Ok(SweepPoint {
                eps: coord[0],
                velocity: coord[1],
                psi_trap: coord[2],
                psi_prime_trap: coord[3],
                a_star: coord[4],
                j22,
            })
        })
        .collect::<Result<_>>()?;

    let by = |better: fn(f64, f64) -> bool| {
        *points
            .iter()
            .reduce(|acc, p| if better(p.j22, acc.j22) { p } else { acc })
            .expect("non-empty grid")
    };
    let min = by(|a, b| a < b);
    let max = by(|a, b| a > b);
    let violations = points.iter().filter(|p| !(p.j22 < 0.0)).copied().collect();
    Ok(SweepReport {
        points_per_axis: k,
        points,
        min,
        max,
        violations,
    })
}

/// Everything the replication subcommand reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixReport {
    pub preset: CalibrationPreset,
    pub j22_eps_0_6: f64,
    pub j22_eps_0_5: f64,
    pub coarse: SweepSummary,
    pub refined: SweepSummary,
    pub all_negative: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub points_per_axis: usize,
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub violations: usize,
}

impl From<&SweepReport> for SweepSummary {
    fn from(r: &SweepReport) -> Self {
        SweepSummary {
            points_per_axis: r.points_per_axis,
            count: r.points.len(),
            min: r.min.j22,
            max: r.max.j22,
            violations: r.violations.len(),
        }
    }
}

pub fn replicate(preset: &CalibrationPreset) -> Result<AppendixReport> {
    let j22_eps_0_6 = j22_local(preset, 0.6)?;
    let j22_eps_0_5 = j22_local(preset, 0.5)?;
    let ranges = SweepRanges::default();
    let coarse = SweepSummary::from(&sweep_j22(preset, &ranges, 5)?);
    let refined = SweepSummary::from(&sweep_j22(preset, &ranges, 9)?);
    let all_negative =
        j22_eps_0_6 < 0.0 && j22_eps_0_5 < 0.0 && coarse.violations == 0 && refined.violations == 0;
    Ok(AppendixReport {
        preset: *preset,
        j22_eps_0_6,
        j22_eps_0_5,
        coarse,
        refined,
        all_negative,
    })
}
